use std::sync::LazyLock;

use regex::Regex;

static WROTE_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*On\s.*wrote:\s*$").expect("valid regex"));
static REPLY_PREFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?i:re|fw|fwd|aw|sv|wg)(\[\d+\])?\s*:\s*").expect("valid regex"));
static SCRIPT_STYLE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?is)<(script|style)\b.*?</(script|style)\s*>").expect("valid regex"));
static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<[^>]*>").expect("valid regex"));

/// Lowercased alphanumeric runs of at least two characters, minus pure numbers.
pub fn tokenize(body: &str) -> Vec<String> {
    body.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2 && !t.chars().all(char::is_numeric))
        .map(str::to_string)
        .collect()
}

/// Drops `>`-quoted lines and everything from an "On ... wrote:" attribution on.
pub fn strip_quoted(body: &str) -> String {
    let mut out = String::with_capacity(body.len());
    for line in body.lines() {
        if WROTE_LINE.is_match(line) {
            break;
        }
        if line.trim_start().starts_with('>') {
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Best-effort HTML to text: drops script/style blocks and tags, decodes the
/// handful of entities that matter for tokenization.
pub fn strip_html(html: &str) -> String {
    let without_blocks = SCRIPT_STYLE.replace_all(html, " ");
    let with_breaks = without_blocks
        .replace("<br>", "\n")
        .replace("<br/>", "\n")
        .replace("<br />", "\n")
        .replace("</p>", "\n");
    let text = TAG.replace_all(&with_breaks, " ");
    text.replace("&nbsp;", " ")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}

/// Subject with reply/forward prefixes removed, lowercased and whitespace-collapsed.
pub fn subject_key(subject: &str) -> String {
    let mut s = subject.trim().to_string();
    loop {
        let stripped = REPLY_PREFIX.replace(&s, "").trim_start().to_string();
        if stripped == s {
            break;
        }
        s = stripped;
    }
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}
