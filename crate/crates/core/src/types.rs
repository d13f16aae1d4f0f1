use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Usefulness judgment attached to a hyperlink, either by a human annotator
/// or by the reasoner.
///
/// Serialized as `"USEFUL"` / `"NOISY"`. On input the numeric convention of
/// the topic files is also accepted: `0` is useful, `1` is noisy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkLabel {
    Useful,
    Noisy,
}

impl LinkLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkLabel::Useful => "USEFUL",
            LinkLabel::Noisy => "NOISY",
        }
    }

    pub fn is_useful(self) -> bool {
        self == LinkLabel::Useful
    }
}

impl fmt::Display for LinkLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "useful" | "u" | "0" => Ok(LinkLabel::Useful),
            "noisy" | "n" | "1" => Ok(LinkLabel::Noisy),
            other => Err(format!("unknown judgment `{other}`")),
        }
    }
}

impl Serialize for LinkLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LinkLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LabelVisitor;

        impl Visitor<'_> for LabelVisitor {
            type Value = LinkLabel;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"USEFUL\", \"NOISY\", 0 or 1")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<LinkLabel, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LinkLabel, E> {
                match v {
                    0 => Ok(LinkLabel::Useful),
                    1 => Ok(LinkLabel::Noisy),
                    _ => Err(E::custom(format!("label must be 0 or 1, got {v}"))),
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LinkLabel, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom(format!("label must be 0 or 1, got {v}")))
                    .and_then(|v| self.visit_u64(v))
            }
        }

        deserializer.deserialize_any(LabelVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_convention() {
        let useful: LinkLabel = serde_json::from_str("0").unwrap();
        let noisy: LinkLabel = serde_json::from_str("1").unwrap();
        assert_eq!(useful, LinkLabel::Useful);
        assert_eq!(noisy, LinkLabel::Noisy);
        assert!(serde_json::from_str::<LinkLabel>("2").is_err());
    }

    #[test]
    fn string_form() {
        assert_eq!(serde_json::to_string(&LinkLabel::Noisy).unwrap(), "\"NOISY\"");
        let l: LinkLabel = serde_json::from_str("\"useful\"").unwrap();
        assert_eq!(l, LinkLabel::Useful);
        assert!("MAYBE".parse::<LinkLabel>().is_err());
    }
}
