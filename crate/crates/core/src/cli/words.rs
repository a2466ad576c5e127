//! Splitting command text into commands and words. Single and double quotes
//! group text; a double-quoted string takes backslash escapes, a
//! single-quoted one is verbatim.

use super::CliError;
use crate::text::unescape;

/// Splits on newlines and `;` outside quotes. A command starting with `#` is
/// a comment running to the end of the line.
pub fn split_commands(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if let Some(q) = quote {
            cur.push(c);
            if escaped {
                escaped = false;
            } else if q == '"' && c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
            }
            continue;
        }
        if c == '#' && cur.trim().is_empty() {
            while chars.peek().is_some_and(|&n| n != '\n') {
                chars.next();
            }
            continue;
        }
        match c {
            '\n' | ';' => push_command(&mut out, &mut cur),
            '"' | '\'' => {
                quote = Some(c);
                cur.push(c);
            }
            c => cur.push(c),
        }
    }
    if quote.is_some() {
        return Err(CliError::Usage("unterminated quote".into()));
    }
    push_command(&mut out, &mut cur);
    Ok(out)
}

fn push_command(out: &mut Vec<String>, cur: &mut String) {
    let cmd = cur.trim();
    if !cmd.is_empty() {
        out.push(cmd.to_string());
    }
    cur.clear();
}

/// A word and the byte offset just past it in the command.
fn spans(cmd: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (i, c) in cmd.char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if q == '"' && c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
            }
            continue;
        }
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, i));
            }
            continue;
        }
        if start.is_none() {
            start = Some(i);
        }
        if c == '"' || c == '\'' {
            quote = Some(c);
        }
    }
    if let Some(s) = start {
        out.push((s, cmd.len()));
    }
    out
}

/// Whitespace-separated words; quotes are kept.
pub fn words(cmd: &str) -> Vec<&str> {
    spans(cmd).into_iter().map(|(s, e)| &cmd[s..e]).collect()
}

/// The raw text after the first `n` words, trimmed.
pub fn rest_after(cmd: &str, n: usize) -> &str {
    match spans(cmd).get(n) {
        Some(&(s, _)) => cmd[s..].trim_end(),
        None => "",
    }
}

/// Strips one level of quoting from a whole word.
pub fn unquote(word: &str) -> Result<String, CliError> {
    let quoted = |q: char| word.len() >= 2 && word.starts_with(q) && word.ends_with(q);
    if quoted('\'') {
        Ok(word[1..word.len() - 1].to_string())
    } else if quoted('"') {
        unescape(&word[1..word.len() - 1]).ok_or_else(|| CliError::Usage(format!("bad escape in {word}")))
    } else {
        Ok(word.to_string())
    }
}
