use clap::ValueEnum;

use ecl_core::interval::{Interval, IntervalBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Readable, decimal enclosures.
    Text,
    /// `key: value` lines with exact endpoints.
    Structured,
}

/// Line-oriented output. Structured lines are `key: value`; text lines pad
/// the key. Both are byte-stable for fixed inputs.
pub struct Out {
    format: Format,
    buf: String,
}

impl Out {
    pub fn new(format: Format) -> Out {
        Out { format, buf: String::new() }
    }

    pub fn structured(&self) -> bool {
        self.format == Format::Structured
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let line = match self.format {
            Format::Structured => format!("{key}: {value}\n"),
            Format::Text => format!("{key:<16} {value}\n"),
        };
        self.buf.push_str(&line);
    }

    pub fn interval(&mut self, key: &str, x: &Interval) {
        match self.format {
            Format::Structured => {
                self.kv(key, x.to_decimal(20));
                self.kv(&format!("{key}-exact"), x.to_exact());
            }
            Format::Text => self.kv(key, x.to_decimal(17)),
        }
    }

    pub fn interval_box(&mut self, key: &str, b: &IntervalBox) {
        match self.format {
            Format::Structured => {
                self.kv(key, format!("{:.20}", b));
                self.kv(&format!("{key}-exact"), b.to_exact());
            }
            Format::Text => self.kv(key, b),
        }
    }

    pub fn flush(self) {
        print!("{}", self.buf);
    }
}
