//! Collection of human usefulness judgments, from a file or interactively.
//! Both modes only visit links that are not labeled yet, so annotation can
//! be resumed at any point.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::TopicError;
use crate::{Error, LinkLabel, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub link_id: String,
    pub user_label: LinkLabel,
}

/// A link awaiting a judgment and the text shown to the annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTarget {
    pub link_id: String,
    pub description: String,
}

fn pending<'a>(targets: &'a [LabelTarget], existing: &[LabelEntry]) -> Vec<&'a LabelTarget> {
    let done: HashSet<&str> = existing.iter().map(|e| e.link_id.as_str()).collect();
    targets
        .iter()
        .filter(|t| !done.contains(t.link_id.as_str()))
        .collect()
}

/// Apply one judgment per non-blank, non-`#` line to the unlabeled targets
/// in order. Returns only the new entries.
pub fn label_from_reader<R: BufRead>(
    targets: &[LabelTarget],
    existing: &[LabelEntry],
    judgments: R,
) -> Result<Vec<LabelEntry>> {
    let mut queue = pending(targets, existing).into_iter();
    let mut out = Vec::new();
    for (idx, line) in judgments.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<judgments>", e))?;
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let label: LinkLabel = token.parse().map_err(|_| TopicError::InvalidJudgment {
            line: idx + 1,
            token: token.to_string(),
        })?;
        let target = queue
            .next()
            .ok_or(TopicError::ExtraJudgment { line: idx + 1 })?;
        out.push(LabelEntry {
            link_id: target.link_id.clone(),
            user_label: label,
        });
    }
    Ok(out)
}

/// Prompt for each unlabeled target. Unknown answers are rejected and the
/// prompt repeated; `q` or end of input stops early. `record` is called
/// after every accepted judgment so progress survives interruption.
pub fn label_interactive<R, W, F>(
    targets: &[LabelTarget],
    existing: &[LabelEntry],
    mut input: R,
    mut output: W,
    mut record: F,
) -> Result<usize>
where
    R: BufRead,
    W: Write,
    F: FnMut(&LabelEntry) -> Result<()>,
{
    let io_err = |e| Error::io("<terminal>", e);
    let todo = pending(targets, existing);
    let total = todo.len();
    let mut labeled = 0;
    for (i, target) in todo.into_iter().enumerate() {
        writeln!(output, "[{}/{}] {}", i + 1, total, target.description).map_err(io_err)?;
        loop {
            write!(output, "useful (u/0) or noisy (n/1)? ").map_err(io_err)?;
            output.flush().map_err(io_err)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io_err)? == 0 {
                return Ok(labeled);
            }
            let answer = line.trim();
            if answer.eq_ignore_ascii_case("q") {
                return Ok(labeled);
            }
            match answer.parse::<LinkLabel>() {
                Ok(user_label) => {
                    record(&LabelEntry {
                        link_id: target.link_id.clone(),
                        user_label,
                    })?;
                    labeled += 1;
                    break;
                }
                Err(msg) => writeln!(output, "{msg}").map_err(io_err)?,
            }
        }
    }
    Ok(labeled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn targets() -> Vec<LabelTarget> {
        ["a", "b", "c"]
            .iter()
            .map(|id| LabelTarget {
                link_id: id.to_string(),
                description: format!("link {id}"),
            })
            .collect()
    }

    #[test]
    fn file_mode_labels_everything() {
        let out = label_from_reader(&targets(), &[], "USEFUL\nnoisy\n\n1\n".as_bytes()).unwrap();
        let labels: Vec<_> = out.iter().map(|e| e.user_label).collect();
        assert_eq!(labels, vec![LinkLabel::Useful, LinkLabel::Noisy, LinkLabel::Noisy]);
        assert_eq!(out[2].link_id, "c");
    }

    #[test]
    fn file_mode_rejects_unknown_token_with_line() {
        let err = label_from_reader(&targets(), &[], "useful\nMAYBE\n".as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("MAYBE"));
    }

    #[test]
    fn resume_only_prompts_remaining() {
        let existing = vec![
            LabelEntry { link_id: "a".into(), user_label: LinkLabel::Useful },
            LabelEntry { link_id: "b".into(), user_label: LinkLabel::Noisy },
        ];
        let mut shown = Vec::new();
        let mut recorded = Vec::new();
        let n = label_interactive(&targets(), &existing, "maybe\nn\n".as_bytes(), &mut shown, |e| {
            recorded.push(e.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(n, 1);
        assert_eq!(recorded, vec![LabelEntry { link_id: "c".into(), user_label: LinkLabel::Noisy }]);
        let transcript = String::from_utf8(shown).unwrap();
        assert!(transcript.contains("[1/1] link c"));
        assert!(!transcript.contains("link a"));
        assert!(transcript.contains("unknown judgment"));
    }

    #[test]
    fn extra_judgments_are_an_error() {
        let err = label_from_reader(&targets()[..1], &[], "u\nu\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
