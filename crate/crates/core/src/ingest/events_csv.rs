//! The canonical event CSV:
//! `message_id,timestamp_iso8601_utc,sender,recipients,in_reply_to,subject_key,tokens`.

use std::io::{Read, Write};
use std::path::Path;

use super::{ActorId, IngestError, MessageEvent, Recipient};
use crate::time::{format_utc, parse_utc};

pub const EVENT_COLUMNS: [&str; 7] = [
    "message_id",
    "timestamp_iso8601_utc",
    "sender",
    "recipients",
    "in_reply_to",
    "subject_key",
    "tokens",
];

pub fn write_event_csv(events: &[MessageEvent], path: &Path) -> Result<(), IngestError> {
    let file = std::fs::File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_event_csv_to(events, std::io::BufWriter::new(file))
}

/// Writes rows sorted by timestamp (stable for equal timestamps).
pub fn write_event_csv_to<W: Write>(events: &[MessageEvent], writer: W) -> Result<(), IngestError> {
    let mut order: Vec<&MessageEvent> = events.iter().collect();
    order.sort_by_key(|e| e.timestamp);
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(EVENT_COLUMNS)?;
    for e in order {
        let recipients = e
            .recipients
            .iter()
            .map(|r| format!("{}:{}", r.actor, r.weight))
            .collect::<Vec<_>>()
            .join(";");
        wtr.write_record([
            e.message_id.as_str(),
            &format_utc(e.timestamp),
            e.sender.as_str(),
            &recipients,
            e.in_reply_to.as_deref().unwrap_or(""),
            &e.subject_key,
            &e.tokens.join(" "),
        ])?;
    }
    wtr.flush().map_err(|e| IngestError::io("<event csv>", e))?;
    Ok(())
}

pub fn read_event_csv(path: &Path) -> Result<Vec<MessageEvent>, IngestError> {
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_event_csv_from(std::io::BufReader::new(file))
}

pub fn read_event_csv_from<R: Read>(reader: R) -> Result<Vec<MessageEvent>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(EVENT_COLUMNS) {
        return Err(IngestError::schema(
            1,
            "header",
            format!("expected {}", EVENT_COLUMNS.join(",")),
        ));
    }
    let mut events = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line());
        if rec.len() != EVENT_COLUMNS.len() {
            return Err(IngestError::schema(
                row,
                "*",
                format!("expected {} fields, found {}", EVENT_COLUMNS.len(), rec.len()),
            ));
        }
        let event = parse_row(&rec, row)?;
        event
            .validate()
            .map_err(|e| IngestError::schema(row, "recipients", e.to_string()))?;
        events.push(event);
    }
    Ok(events)
}

fn parse_row(rec: &csv::StringRecord, row: u64) -> Result<MessageEvent, IngestError> {
    let message_id = rec[0].to_string();
    if message_id.is_empty() {
        return Err(IngestError::schema(row, EVENT_COLUMNS[0], "empty message id"));
    }
    let timestamp = parse_utc(&rec[1])
        .ok_or_else(|| IngestError::schema(row, EVENT_COLUMNS[1], format!("bad timestamp {:?}", &rec[1])))?;
    let sender = ActorId::new(&rec[2]).map_err(|e| IngestError::schema(row, EVENT_COLUMNS[2], e.to_string()))?;
    let mut recipients = Vec::new();
    for item in rec[3].split(';').filter(|s| !s.is_empty()) {
        let bad = |msg: String| IngestError::schema(row, EVENT_COLUMNS[3], msg);
        let (addr, weight) = item
            .rsplit_once(':')
            .ok_or_else(|| bad(format!("expected addr:weight, got {item:?}")))?;
        let actor = ActorId::new(addr).map_err(|e| bad(e.to_string()))?;
        let weight: f64 = weight.parse().map_err(|_| bad(format!("bad weight {weight:?}")))?;
        recipients.push(Recipient { actor, weight });
    }
    let in_reply_to = (!rec[4].is_empty()).then(|| rec[4].to_string());
    Ok(MessageEvent {
        message_id,
        timestamp,
        sender,
        recipients,
        in_reply_to,
        subject_key: rec[5].to_string(),
        tokens: rec[6].split_whitespace().map(str::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "message_id,timestamp_iso8601_utc,sender,recipients,in_reply_to,subject_key,tokens\n";

    #[test]
    fn header_only_is_empty() {
        assert!(read_event_csv_from(HEADER.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn bad_timestamp_names_row_and_column() {
        let data =
            format!("{HEADER}m1,2024-01-01T00:00:00Z,a@x.com,b@x.com:1,,,\nm2,not-a-date,a@x.com,b@x.com:1,,,\n");
        let err = read_event_csv_from(data.as_bytes()).unwrap_err();
        match err {
            IngestError::Schema { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "timestamp_iso8601_utc");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn invariant_violations_are_schema_errors() {
        for recips in [
            "",
            "a@x.com:1",
            "b@x.com:0",
            "b@x.com:1.5",
            "b@x.com",
            "b@x.com:1;b@x.com:0.5",
        ] {
            let data = format!("{HEADER}m1,2024-01-01T00:00:00Z,a@x.com,{recips},,,\n");
            assert!(
                matches!(
                    read_event_csv_from(data.as_bytes()),
                    Err(IngestError::Schema { row: 2, .. })
                ),
                "{recips:?}"
            );
        }
        let wrong_header = "id,ts\n";
        assert!(read_event_csv_from(wrong_header.as_bytes()).is_err());
    }

    #[test]
    fn rows_written_in_time_order() {
        let data = format!(
            "{HEADER}m2,2024-01-02T00:00:00Z,a@x.com,b@x.com:1,m1,budget,hello world\n\
             m1,2024-01-01T00:00:00Z,b@x.com,a@x.com:1;c@x.com:0.5,,\"budget, q1\",\n"
        );
        let events = read_event_csv_from(data.as_bytes()).unwrap();
        assert_eq!(events[1].subject_key, "budget, q1");
        let mut out = Vec::new();
        write_event_csv_to(&events, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[1].starts_with("m1,2024-01-01T00:00:00Z,b@x.com,a@x.com:1;c@x.com:0.5,,"));
        assert!(lines[2].starts_with("m2,"));
        assert!(lines[2].ends_with(",m1,budget,hello world"));
    }
}
