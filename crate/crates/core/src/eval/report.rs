use std::fmt::Write as _;

/// Plain-text report made of titled sections of `key = value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a new section; following [`Report::entry`] calls land in it.
    pub fn section(&mut self, title: impl Into<String>) -> &mut Self {
        self.sections.push((title.into(), Vec::new()));
        self
    }

    pub fn entry(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        if self.sections.is_empty() {
            self.section("general");
        }
        let last = self.sections.last_mut().expect("section exists");
        last.1.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .filter(|(t, _)| t == section)
            .flat_map(|(_, e)| e)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, (title, entries)) in self.sections.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            writeln!(s, "[{title}]").unwrap();
            for (k, v) in entries {
                writeln!(s, "{k} = {v}").unwrap();
            }
        }
        s
    }
}
