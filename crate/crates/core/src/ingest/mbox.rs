use std::collections::HashSet;
use std::path::Path;

use chrono::{DateTime, Utc};
use mailparse::{MailAddr, MailHeaderMap, ParsedMail};
use sha2::{Digest, Sha256};

use super::text::{strip_html, strip_quoted, subject_key, tokenize};
use super::{canonicalize_actor, ActorId, IngestConfig, IngestError, IngestReport, MessageEvent, Recipient};
use crate::time::parse_mail_date;

/// Reads an mbox file. Events come back in file order; callers sort.
pub fn parse_mbox(path: &Path, config: &IngestConfig) -> Result<(Vec<MessageEvent>, IngestReport), IngestError> {
    let bytes = std::fs::read(path).map_err(|e| IngestError::io(path, e))?;
    Ok(parse_mbox_bytes(&bytes, config))
}

pub fn parse_mbox_bytes(bytes: &[u8], config: &IngestConfig) -> (Vec<MessageEvent>, IngestReport) {
    let mut report = IngestReport::default();
    let mut seen_ids = HashSet::new();
    let mut events = Vec::new();
    for chunk in split_mbox(bytes) {
        match parse_message(&chunk, config) {
            Ok(Parsed::Event(event)) => {
                if seen_ids.insert(event.message_id.clone()) {
                    report.parsed += 1;
                    events.push(event);
                } else {
                    report.deduped += 1;
                }
            }
            Ok(Parsed::Broadcast) => report.broadcast_dropped += 1,
            Err(reason) => report.skip(reason),
        }
    }
    (events, report)
}

/// Splits an mbox into raw messages. A separator is a `From ` line at the
/// start of the file or after a blank line; `>From ` escapes are undone.
pub fn split_mbox(bytes: &[u8]) -> Vec<Vec<u8>> {
    let mut messages = Vec::new();
    let mut current: Option<Vec<u8>> = None;
    let mut prev_blank = true;
    let mut leading = Vec::new();

    for line in bytes.split_inclusive(|&b| b == b'\n') {
        if prev_blank && line.starts_with(b"From ") {
            if let Some(done) = current.take() {
                messages.push(done);
            }
            current = Some(Vec::new());
            prev_blank = false;
            continue;
        }
        let content = line.strip_suffix(b"\n").unwrap_or(line);
        let content = content.strip_suffix(b"\r").unwrap_or(content);
        prev_blank = content.is_empty();

        let target = current.as_mut().unwrap_or(&mut leading);
        let quoted_from = line
            .iter()
            .position(|&b| b != b'>')
            .is_some_and(|i| i > 0 && line[i..].starts_with(b"From "));
        if quoted_from {
            target.extend_from_slice(&line[1..]);
        } else {
            target.extend_from_slice(line);
        }
    }
    if let Some(done) = current {
        messages.push(done);
    }
    // Content before the first separator: a bare message file, or junk that
    // the message parser will reject and count.
    if leading.iter().any(|b| !b.is_ascii_whitespace()) {
        messages.insert(0, leading);
    }
    messages
}

enum Parsed {
    Event(MessageEvent),
    Broadcast,
}

fn parse_message(raw: &[u8], config: &IngestConfig) -> Result<Parsed, &'static str> {
    let mail = mailparse::parse_mail(raw).map_err(|_| "malformed message")?;
    let headers = &mail.headers;

    let from_header = headers.get_first_header("From").ok_or("missing from")?;
    let sender = header_addresses(from_header, config)
        .into_iter()
        .next()
        .ok_or("unparseable sender")?;

    let date_raw = headers.get_first_value("Date").ok_or("missing date")?;
    let timestamp = parse_mail_date(&date_raw).ok_or("unparseable date")?;
    if let Some((start, end)) = config.date_range {
        if timestamp < start || timestamp >= end {
            return Err("outside date range");
        }
    }

    let mut recipients: Vec<Recipient> = Vec::new();
    for (name, weight) in [("To", config.to_weight), ("Cc", config.cc_weight)] {
        for header in headers.get_all_headers(name) {
            for actor in header_addresses(header, config) {
                if actor == sender || recipients.iter().any(|r| r.actor == actor) {
                    continue;
                }
                recipients.push(Recipient { actor, weight });
            }
        }
    }
    if recipients.is_empty() {
        return Err("no recipients");
    }
    if recipients.len() > config.broadcast_threshold {
        return Ok(Parsed::Broadcast);
    }

    let message_id = headers
        .get_first_value("Message-ID")
        .and_then(|v| angle_token(&v))
        .unwrap_or_else(|| synthesize_id(raw));
    let in_reply_to = headers.get_first_value("In-Reply-To").and_then(|v| angle_token(&v));
    let subject = headers.get_first_value("Subject").unwrap_or_default();
    let body = body_text(&mail).unwrap_or_default();

    let event = MessageEvent {
        message_id,
        timestamp: truncate_to_second(timestamp),
        sender,
        recipients,
        in_reply_to,
        subject_key: subject_key(&subject),
        tokens: tokenize(&strip_quoted(&body)),
    };
    event.validate().map_err(|_| "invalid event")?;
    Ok(Parsed::Event(event))
}

fn truncate_to_second(ts: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(ts.timestamp(), 0).unwrap_or(ts)
}

/// Canonical addresses from an address-list header; unparseable entries are skipped.
fn header_addresses(header: &mailparse::MailHeader, config: &IngestConfig) -> Vec<ActorId> {
    let mut raw_addrs = Vec::new();
    match mailparse::addrparse_header(header) {
        Ok(list) => {
            for addr in list.iter() {
                match addr {
                    MailAddr::Single(info) => raw_addrs.push(info.addr.clone()),
                    MailAddr::Group(group) => raw_addrs.extend(group.addrs.iter().map(|i| i.addr.clone())),
                }
            }
        }
        Err(_) => raw_addrs.extend(header.get_value().split(',').map(str::to_string)),
    }
    raw_addrs
        .iter()
        .filter_map(|raw| canonicalize_actor(raw, &config.aliases).ok())
        .collect()
}

/// Content of the first `<...>` token, or the trimmed value when unbracketed.
fn angle_token(value: &str) -> Option<String> {
    let value = value.trim();
    let token = match (value.find('<'), value.find('>')) {
        (Some(open), Some(close)) if open < close => &value[open + 1..close],
        _ => value.split_whitespace().next().unwrap_or(""),
    };
    let token = token.trim();
    (!token.is_empty()).then(|| token.to_string())
}

fn synthesize_id(raw: &[u8]) -> String {
    let digest = Sha256::digest(raw);
    let hex: String = digest.iter().take(12).map(|b| format!("{b:02x}")).collect();
    format!("synthetic-{hex}")
}

fn body_text(mail: &ParsedMail) -> Option<String> {
    if let Some(plain) = find_part(mail, "text/plain") {
        return plain.get_body().ok();
    }
    find_part(mail, "text/html").and_then(|html| html.get_body().ok().map(|b| strip_html(&b)))
}

fn find_part<'a>(mail: &'a ParsedMail<'a>, mimetype: &str) -> Option<&'a ParsedMail<'a>> {
    if mail.subparts.is_empty() {
        let is_attachment = mail.get_content_disposition().disposition == mailparse::DispositionType::Attachment;
        return (mail.ctype.mimetype.eq_ignore_ascii_case(mimetype) && !is_attachment).then_some(mail);
    }
    mail.subparts.iter().find_map(|p| find_part(p, mimetype))
}
