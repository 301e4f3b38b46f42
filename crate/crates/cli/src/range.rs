use std::fmt;
use std::str::FromStr;

/// Inclusive integer grid `start:stop:step`; `stop` is included only when
/// the step lands on it. `A` and `A:B` are shorthand for `A:A:1` and `A:B:1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl Range {
    pub fn single(v: usize) -> Self {
        Self { start: v, stop: v, step: 1 }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad range component '{p}' in '{s}'"));
        let (start, stop, step) = match parts.as_slice() {
            [a] => (num(a)?, num(a)?, 1),
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("range '{s}' must be start:stop:step")),
        };
        if step == 0 {
            return Err(format!("range '{s}' has zero step"));
        }
        if start > stop {
            return Err(format!("range '{s}' is empty"));
        }
        Ok(Self { start, stop, step })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}
