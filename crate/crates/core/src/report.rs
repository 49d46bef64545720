//! Deterministic JSON and text reports.

use serde_json::{json, Map, Value};

use crate::compat::{Analysis, Verdict};

pub const FORMAT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// One line of a report.  `certificates` holds check-specific data; serde's
/// map keeps keys sorted, which fixes the output byte for byte.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub criterion: String,
    pub subject: String,
    pub applicable: bool,
    pub result: String,
    pub certificates: Map<String, Value>,
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(
        criterion: impl Into<String>,
        subject: impl Into<String>,
        result: impl Into<String>,
    ) -> Self {
        Check {
            criterion: criterion.into(),
            subject: subject.into(),
            applicable: true,
            result: result.into(),
            certificates: Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn cert(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.certificates.insert(key.to_string(), v.into());
        self
    }

    pub fn from_verdict(subject: &str, v: &Verdict) -> Self {
        let c = &v.certificates;
        let residues: Vec<Value> = c
            .residues
            .iter()
            .map(|r| json!({"pair": r.pair, "expr": r.expr.to_string(), "order_used": r.order_used, "order_bound": r.order_bound}))
            .collect();
        let mut ch = Check::new(v.criterion.name(), subject, v.result.name())
            .cert("codim", c.codim)
            .cert("residues", residues)
            .cert("order_audit", c.order_audit);
        if !c.seed_codims.is_empty() {
            ch = ch.cert("seed_codims", c.seed_codims.clone());
        }
        if !c.ideal.is_empty() {
            ch = ch.cert("ideal", c.ideal.clone());
        }
        if !c.syzygies.is_empty() {
            ch = ch.cert("syzygies", c.syzygies.clone());
        }
        ch.applicable = v.applicable;
        ch.notes = v.notes.clone();
        ch
    }

    fn to_value(&self) -> Value {
        json!({
            "criterion": self.criterion,
            "subject": self.subject,
            "applicable": self.applicable,
            "result": self.result,
            "certificates": Value::Object(self.certificates.clone()),
            "notes": self.notes,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(seed: u64) -> Self {
        Report {
            seed,
            checks: Vec::new(),
        }
    }

    /// Symmetry checks, criterion verdicts and the aggregate outcome.
    pub fn push_analysis(&mut self, a: &Analysis) {
        let subject = if a.symmetries.is_empty() {
            a.system.clone()
        } else {
            format!("{}+{}", a.system, a.symmetries.join("+"))
        };
        for s in &a.symmetry_status {
            let mut ch = Check::new(
                "IsSymmetry",
                format!("{}/{}", a.system, s.name),
                if s.verified() { "holds" } else { "fails" },
            );
            if let Some(c) = &s.check {
                let res: Vec<Value> = c
                    .residues
                    .iter()
                    .map(|(k, e)| json!({"pair": k, "expr": e.to_string()}))
                    .collect();
                ch = ch.cert("residues", res);
            }
            if let Some(e) = &s.error {
                ch.notes.push(e.clone());
            }
            self.checks.push(ch);
        }
        for v in &a.verdicts {
            self.checks.push(Check::from_verdict(&subject, v));
        }
        let mut agg = Check::new("Aggregate", subject, a.result.name());
        if let Some(r) = &a.char_report {
            agg = agg.cert("codim", r.codim);
        }
        if let Some(e) = &a.char_error {
            agg.notes.push(e.clone());
        }
        if !a.orthonomic.valid {
            agg.notes.extend(a.orthonomic.violations.iter().cloned());
        }
        self.checks.push(agg);
    }

    /// Checks ordered by subject then criterion, whatever order they were
    /// produced in.
    pub fn sorted_checks(&self) -> Vec<&Check> {
        let mut v: Vec<&Check> = self.checks.iter().collect();
        v.sort_by(|a, b| (&a.subject, &a.criterion).cmp(&(&b.subject, &b.criterion)));
        v
    }

    pub fn to_json(&self) -> String {
        let checks: Vec<Value> = self.sorted_checks().iter().map(|c| c.to_value()).collect();
        let v = json!({"version": FORMAT_VERSION, "seed": self.seed, "checks": checks});
        let mut s = serde_json::to_string_pretty(&v).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("jetbracket {}  seed {}\n", FORMAT_VERSION, self.seed);
        let checks = self.sorted_checks();
        let w0 = checks
            .iter()
            .map(|c| c.subject.len())
            .max()
            .unwrap_or(0)
            .max(7);
        let w1 = checks
            .iter()
            .map(|c| c.criterion.len())
            .max()
            .unwrap_or(0)
            .max(9);
        out.push_str(&format!(
            "{:w0$}  {:w1$}  {:10}  {}\n",
            "subject", "criterion", "applicable", "result"
        ));
        for c in checks {
            let app = if c.applicable { "yes" } else { "no" };
            out.push_str(&format!(
                "{:w0$}  {:w1$}  {:10}  {}\n",
                c.subject, c.criterion, app, c.result
            ));
            for (k, v) in &c.certificates {
                match v {
                    Value::Null => {}
                    Value::Array(items) if items.is_empty() => {}
                    Value::Array(items) => {
                        out.push_str(&format!("    {}:\n", k));
                        for it in items {
                            out.push_str(&format!("      {}\n", text_item(it)));
                        }
                    }
                    other => out.push_str(&format!("    {}: {}\n", k, text_item(other))),
                }
            }
            for n in &c.notes {
                out.push_str(&format!("    note: {}\n", n));
            }
        }
        out
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn text_item(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(m) if m.contains_key("pair") => {
            let expr = m.get("expr").and_then(Value::as_str).unwrap_or("");
            format!("{}: {}", m["pair"].as_str().unwrap_or(""), expr)
        }
        Value::Array(items) => format!(
            "({})",
            items.iter().map(text_item).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_has_no_checks() {
        let r = Report::new(42);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["seed"], json!(42));
    }

    #[test]
    fn checks_are_sorted_and_keys_ordered() {
        let mut r = Report::new(1);
        r.checks
            .push(Check::new("B", "s", "x").cert("zeta", 1).cert("alpha", 2));
        r.checks.push(Check::new("A", "s", "y"));
        let s = r.to_json();
        assert!(s.find("\"A\"").unwrap() < s.find("\"B\"").unwrap());
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.find("\"checks\"").unwrap() < s.find("\"seed\"").unwrap());
        assert!(r.to_text().contains("zeta: 1"));
    }
}
