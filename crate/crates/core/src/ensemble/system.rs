use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A finite state space with a reference measure, named observables and an
/// invariant label (energy shell, particle number, ...) on every state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSystem<T> {
    ids: Vec<String>,
    measure: Vec<T>,
    shell_of: Vec<usize>,
    labels: Vec<String>,
    observable_names: Vec<String>,
    observables: Vec<Vec<T>>,
}

impl<T: Real> DiscreteSystem<T> {
    /// Builds a system without observables. Labels are opaque strings; states
    /// sharing a label belong to the same invariant shell.
    pub fn new<S: Into<String>, L: AsRef<str>>(
        ids: impl IntoIterator<Item = S>,
        measure: Vec<T>,
        labels: impl IntoIterator<Item = L>,
    ) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        if measure.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: measure.len(),
            });
        }
        let mut seen = HashMap::with_capacity(n);
        for id in &ids {
            if seen.insert(id.as_str(), ()).is_some() {
                return Err(Error::DuplicateState(id.clone()));
            }
        }
        for (index, &m) in measure.iter().enumerate() {
            if !(m.is_finite() && m > T::zero()) {
                return Err(Error::InvalidMeasure {
                    index,
                    value: m.as_f64(),
                });
            }
        }
        let mut shell_index: HashMap<String, usize> = HashMap::new();
        let mut unique = Vec::new();
        let mut shell_of = Vec::with_capacity(n);
        for label in labels {
            let label = label.as_ref();
            let idx = *shell_index.entry(label.to_owned()).or_insert_with(|| {
                unique.push(label.to_owned());
                unique.len() - 1
            });
            shell_of.push(idx);
        }
        if shell_of.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: shell_of.len(),
            });
        }
        Ok(Self {
            ids,
            measure,
            shell_of,
            labels: unique,
            observable_names: Vec::new(),
            observables: Vec::new(),
        })
    }

    /// `n` states with unit measure in a single shell, ids `0..n`.
    pub fn uniform(n: usize) -> Self {
        Self::new(
            (0..n).map(|i| i.to_string()),
            vec![T::one(); n],
            std::iter::repeat_n("all", n),
        )
        .expect("uniform system is valid")
    }

    pub fn with_observable(mut self, name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        self.add_observable(name, values)?;
        Ok(self)
    }

    pub fn add_observable(&mut self, name: impl Into<String>, values: Vec<T>) -> Result<()> {
        let name = name.into();
        if self.observable_names.contains(&name) {
            return Err(Error::DuplicateObservable(name));
        }
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteObservable { name, index });
        }
        self.observable_names.push(name);
        self.observables.push(values);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn measure(&self) -> &[T] {
        &self.measure
    }

    pub fn total_measure(&self) -> T {
        self.measure.iter().copied().sum()
    }

    /// Distinct invariant labels, in order of first appearance.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn shell_count(&self) -> usize {
        self.labels.len()
    }

    /// Shell index of every state, indexing into [`labels`](Self::labels).
    pub fn shell_indices(&self) -> &[usize] {
        &self.shell_of
    }

    pub fn label_of(&self, state: usize) -> &str {
        &self.labels[self.shell_of[state]]
    }

    pub fn observable_names(&self) -> &[String] {
        &self.observable_names
    }

    pub fn observable(&self, name: &str) -> Result<&[T]> {
        self.observable_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.observables[i].as_slice())
            .ok_or_else(|| Error::UnknownObservable(name.to_owned()))
    }

    /// Cartesian product `self ⊗ other`. State `(a, b)` gets id `a|b`, measure
    /// `m_a·m_b` and label `la|lb`. Observables are lifted with the given
    /// prefixes, e.g. `S.H` and `R.H`.
    pub fn product(&self, other: &Self, prefix_self: &str, prefix_other: &str) -> Result<Self> {
        let n = self.len() * other.len();
        let mut ids = Vec::with_capacity(n);
        let mut measure = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for a in 0..self.len() {
            for b in 0..other.len() {
                ids.push(format!("{}|{}", self.ids[a], other.ids[b]));
                measure.push(self.measure[a] * other.measure[b]);
                labels.push(format!("{}|{}", self.label_of(a), other.label_of(b)));
            }
        }
        let mut out = Self::new(ids, measure, labels)?;
        for (name, values) in self.observable_names.iter().zip(&self.observables) {
            let lifted = (0..n).map(|z| values[z / other.len()]).collect();
            out.add_observable(format!("{prefix_self}{name}"), lifted)?;
        }
        for (name, values) in other.observable_names.iter().zip(&other.observables) {
            let lifted = (0..n).map(|z| values[z % other.len()]).collect();
            out.add_observable(format!("{prefix_other}{name}"), lifted)?;
        }
        Ok(out)
    }

    /// Parses the whitespace separated text format:
    ///
    /// ```text
    /// # comment
    /// observables energy spin
    /// states 3
    /// a 1.0 E0 0.0  1
    /// b 1.0 E1 1.0 -1
    /// c 2.0 E1 1.0  1
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Option<Vec<String>> = None;
        let mut declared: Option<(usize, usize)> = None;
        let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens[0] {
                "observables" => {
                    if names.is_some() || declared.is_some() {
                        return Err(parse_err(line, "`observables` must appear once, before `states`"));
                    }
                    names = Some(tokens[1..].iter().map(|s| s.to_string()).collect());
                }
                "states" => {
                    if declared.is_some() {
                        return Err(parse_err(line, "duplicate `states` header"));
                    }
                    if tokens.len() != 2 {
                        return Err(parse_err(line, "expected `states N`"));
                    }
                    let n = tokens[1]
                        .parse::<usize>()
                        .map_err(|_| parse_err(line, format!("bad state count `{}`", tokens[1])))?;
                    declared = Some((n, line));
                }
                _ => {
                    if declared.is_none() {
                        return Err(parse_err(line, "state line before `states N` header"));
                    }
                    rows.push((line, tokens));
                }
            }
        }
        let (n, header_line) = declared.ok_or_else(|| parse_err(1, "missing `states N` header"))?;
        if rows.len() != n {
            return Err(parse_err(
                header_line,
                format!("header declares {n} states but {} follow", rows.len()),
            ));
        }
        let names = names.unwrap_or_default();
        let width = 3 + names.len();
        let mut ids = Vec::with_capacity(n);
        let mut measure = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut columns = vec![Vec::with_capacity(n); names.len()];
        for (line, tokens) in &rows {
            if tokens.len() != width {
                return Err(parse_err(
                    *line,
                    format!("expected {width} fields, found {}", tokens.len()),
                ));
            }
            ids.push(tokens[0].to_string());
            measure.push(parse_real::<T>(*line, tokens[1])?);
            labels.push(tokens[2]);
            for (col, tok) in columns.iter_mut().zip(&tokens[3..]) {
                col.push(parse_real::<T>(*line, tok)?);
            }
        }
        let line_of = |index: usize| rows.get(index).map_or(header_line, |r| r.0);
        let mut sys = Self::new(ids, measure, labels).map_err(|e| match e {
            Error::InvalidMeasure { index, value } => {
                parse_err(line_of(index), format!("measure {value} must be positive and finite"))
            }
            Error::DuplicateState(id) => parse_err(header_line, format!("duplicate state id `{id}`")),
            other => other,
        })?;
        for (name, col) in names.into_iter().zip(columns) {
            sys.add_observable(name, col)
                .map_err(|e| parse_err(header_line, e.to_string()))?;
        }
        Ok(sys)
    }

    /// Serializes into the format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.observable_names.is_empty() {
            let _ = writeln!(out, "observables {}", self.observable_names.join(" "));
        }
        let _ = writeln!(out, "states {}", self.len());
        for z in 0..self.len() {
            let _ = write!(out, "{} {} {}", self.ids[z], self.measure[z], self.label_of(z));
            for col in &self.observables {
                let _ = write!(out, " {}", col[z]);
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_real<T: Real>(line: usize, token: &str) -> Result<T> {
    token
        .parse::<T>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("`{token}` is not a finite number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# toy system
observables energy spin
states 3
a 1.0 E0 0.0  1   # ground
b 1.0 E1 1.0 -1
c 2.0 E1 1.0  1
";

    #[test]
    fn parses_and_round_trips() {
        let sys = DiscreteSystem::<f64>::parse(SAMPLE).unwrap();
        assert_eq!(sys.len(), 3);
        assert_eq!(sys.labels(), ["E0", "E1"]);
        assert_eq!(sys.shell_indices(), [0, 1, 1]);
        assert_eq!(sys.observable("spin").unwrap(), [1.0, -1.0, 1.0]);
        assert_eq!(sys.measure(), [1.0, 1.0, 2.0]);
        let again = DiscreteSystem::<f64>::parse(&sys.to_text()).unwrap();
        assert_eq!(sys, again);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "observables x\nstates 2\na 1 L 0\nb -1 L 1\n";
        match DiscreteSystem::<f64>::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let short = "observables x\nstates 2\na 1 L\nb 1 L 1\n";
        match DiscreteSystem::<f64>::parse(short) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let count = "states 3\na 1 L\n";
        assert!(matches!(
            DiscreteSystem::<f64>::parse(count),
            Err(Error::Parse { line: 1, .. })
        ));
        let nan = "observables x\nstates 1\na 1 L nan\n";
        assert!(matches!(
            DiscreteSystem::<f64>::parse(nan),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_bad_measure_and_duplicates() {
        assert!(matches!(
            DiscreteSystem::<f64>::new(["a", "b"], vec![1.0, 0.0], ["x", "x"]),
            Err(Error::InvalidMeasure { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteSystem::<f64>::new(["a", "a"], vec![1.0, 1.0], ["x", "x"]),
            Err(Error::DuplicateState(_))
        ));
        let sys = DiscreteSystem::<f64>::uniform(2)
            .with_observable("x", vec![0.0, 1.0])
            .unwrap();
        assert!(matches!(
            sys.with_observable("x", vec![1.0, 1.0]),
            Err(Error::DuplicateObservable(_))
        ));
    }

    #[test]
    fn product_lifts_observables() {
        let a = DiscreteSystem::<f64>::new(["u", "d"], vec![1.0, 2.0], ["0", "1"])
            .unwrap()
            .with_observable("H", vec![0.0, 1.0])
            .unwrap();
        let b = DiscreteSystem::<f64>::uniform(3)
            .with_observable("H", vec![0.0, 0.5, 1.5])
            .unwrap();
        let ab = a.product(&b, "S.", "R.").unwrap();
        assert_eq!(ab.len(), 6);
        assert_eq!(ab.ids()[4], "d|1");
        assert_eq!(ab.measure()[4], 2.0);
        assert_eq!(ab.observable("S.H").unwrap(), [0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(ab.observable("R.H").unwrap(), [0.0, 0.5, 1.5, 0.0, 0.5, 1.5]);
        assert_eq!(ab.shell_count(), 2);
    }
}
