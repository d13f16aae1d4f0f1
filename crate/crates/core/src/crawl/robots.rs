//! Minimal robots.txt evaluation: user-agent groups with `Allow` and
//! `Disallow` path prefixes, longest match wins, ties go to `Allow`.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RobotsRules {
    rules: Vec<(bool, String)>,
}

impl RobotsRules {
    pub fn allow_all() -> Self {
        Self::default()
    }

    /// Picks the group naming `user_agent` (case-insensitive substring of the
    /// product token), falling back to the `*` group.
    pub fn parse(text: &str, user_agent: &str) -> Self {
        let agent = user_agent
            .split('/')
            .next()
            .unwrap_or(user_agent)
            .trim()
            .to_ascii_lowercase();

        let mut specific: Option<Vec<(bool, String)>> = None;
        let mut wildcard: Option<Vec<(bool, String)>> = None;

        let mut group_agents: Vec<String> = Vec::new();
        let mut group_rules: Vec<(bool, String)> = Vec::new();
        let mut in_rules = false;

        let mut flush = |agents: &mut Vec<String>, rules: &mut Vec<(bool, String)>| {
            for a in agents.iter() {
                if a == "*" {
                    wildcard.get_or_insert_with(Vec::new).extend(rules.iter().cloned());
                } else if !agent.is_empty() && agent.contains(a.as_str()) {
                    specific.get_or_insert_with(Vec::new).extend(rules.iter().cloned());
                }
            }
            agents.clear();
            rules.clear();
        };

        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "user-agent" => {
                    if in_rules {
                        flush(&mut group_agents, &mut group_rules);
                        in_rules = false;
                    }
                    group_agents.push(value.to_ascii_lowercase());
                }
                "disallow" | "allow" => {
                    in_rules = true;
                    // An empty Disallow grants everything; no rule needed.
                    if !value.is_empty() {
                        group_rules.push((key == "allow", value.to_string()));
                    }
                }
                _ => {}
            }
        }
        flush(&mut group_agents, &mut group_rules);

        RobotsRules {
            rules: specific.or(wildcard).unwrap_or_default(),
        }
    }

    /// `path` should include the query string when present.
    pub fn allows(&self, path: &str) -> bool {
        let mut best: Option<(usize, bool)> = None;
        for (allow, prefix) in &self.rules {
            if path.starts_with(prefix.as_str()) {
                let len = prefix.len();
                best = match best {
                    Some((l, a)) if l > len || (l == len && a) => Some((l, a)),
                    _ => Some((len, *allow)),
                };
            }
        }
        best.map_or(true, |(_, allow)| allow)
    }
}
