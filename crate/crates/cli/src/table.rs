use std::fmt::Write as _;

/// CSV text with `#` header comments and LF line endings.
#[derive(Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(command: &str) -> Self {
        let mut t = Self::default();
        t.comment(&format!("freecsk {command}"));
        t
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn setting(&mut self, key: &str, value: impl std::fmt::Display) {
        self.comment(&format!("{key} = {value}"));
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let cells: Vec<String> = cells.into_iter().map(|c| quote(c.as_ref())).collect();
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\"").replace('\n', " "))
    } else {
        cell.to_string()
    }
}
