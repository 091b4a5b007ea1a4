//! Law certificate: every verdict is recomputable from the stored value,
//! threshold and comparison.

use qthermo_core::gkls::fmt_sig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
}

impl Check {
    pub fn passes(&self) -> bool {
        match self.comparison {
            Comparison::AtMost => self.value <= self.threshold,
            Comparison::AtLeast => self.value >= self.threshold,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn at_most(&mut self, name: &'static str, value: f64, threshold: f64) {
        self.checks.push(Check { name, value, threshold, comparison: Comparison::AtMost });
    }

    pub fn at_least(&mut self, name: &'static str, value: f64, threshold: f64) {
        self.checks.push(Check { name, value, threshold, comparison: Comparison::AtLeast });
    }

    pub fn passes(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }

    /// `check,value,threshold,comparison,verdict`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,value,threshold,comparison,verdict\n");
        for c in &self.checks {
            let cmp = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            let verdict = if c.passes() { "pass" } else { "fail" };
            s.push_str(&format!("{},{},{},{cmp},{verdict}\n", c.name, fmt_sig(c.value), fmt_sig(c.threshold)));
        }
        s
    }
}
