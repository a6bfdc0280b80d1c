use std::io::{BufWriter, Write};
use std::path::Path;

use super::SynthError;
use crate::ingest::MessageEvent;

const LINE_WIDTH: usize = 72;

pub fn write_mbox(events: &[MessageEvent], path: &Path) -> Result<(), SynthError> {
    let io = |source| SynthError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_mbox_to(events, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

/// Renders events as an mboxrd stream. Full-weight recipients go to `To`,
/// the rest to `Cc`; tokens become the body.
pub fn write_mbox_to<W: Write>(events: &[MessageEvent], mut w: W) -> std::io::Result<()> {
    for e in events {
        writeln!(w, "From {} {}", e.sender, e.timestamp.format("%a %b %e %H:%M:%S %Y"))?;
        writeln!(w, "From: <{}>", e.sender)?;
        let list = |full: bool| {
            e.recipients
                .iter()
                .filter(|r| (r.weight >= 1.0) == full)
                .map(|r| format!("<{}>", r.actor))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let (to, cc) = (list(true), list(false));
        if !to.is_empty() {
            writeln!(w, "To: {to}")?;
        }
        if !cc.is_empty() {
            writeln!(w, "Cc: {cc}")?;
        }
        writeln!(w, "Date: {}", e.timestamp.to_rfc2822())?;
        writeln!(w, "Message-ID: <{}>", e.message_id)?;
        if let Some(parent) = &e.in_reply_to {
            writeln!(w, "In-Reply-To: <{parent}>")?;
        }
        writeln!(w, "Subject: {}", e.subject_key)?;
        writeln!(w, "Content-Type: text/plain; charset=utf-8")?;
        writeln!(w)?;
        let mut line = String::new();
        for t in &e.tokens {
            if !line.is_empty() && line.len() + 1 + t.len() > LINE_WIDTH {
                write_body_line(&mut w, &line)?;
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(t);
        }
        if !line.is_empty() {
            write_body_line(&mut w, &line)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn write_body_line<W: Write>(w: &mut W, line: &str) -> std::io::Result<()> {
    if line.trim_start_matches('>').starts_with("From ") {
        w.write_all(b">")?;
    }
    writeln!(w, "{line}")
}
