use crate::ensemble::DiscreteSystem;
use crate::ensemble::system::{parse_err, parse_real};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `⟨F⟩ = f` for one named observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub observable: String,
    pub target: T,
}

/// Expectation constraints, in a fixed order that matches the multipliers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintSet<T> {
    constraints: Vec<Constraint<T>>,
}

impl<T: Real> ConstraintSet<T> {
    pub fn new<S: Into<String>>(items: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let mut constraints: Vec<Constraint<T>> = Vec::new();
        for (name, target) in items {
            let observable = name.into();
            if constraints.iter().any(|c| c.observable == observable) {
                return Err(Error::DuplicateObservable(observable));
            }
            if !target.is_finite() {
                return Err(Error::Config(format!("target for `{observable}` is not finite")));
            }
            constraints.push(Constraint { observable, target });
        }
        Ok(Self { constraints })
    }

    pub fn empty() -> Self {
        Self {
            constraints: Vec::new(),
        }
    }

    /// One `observable_name target_value` pair per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut items: Vec<(String, T)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(parse_err(line, "expected `observable_name target_value`"));
            }
            if items.iter().any(|(n, _)| n == tokens[0]) {
                return Err(parse_err(line, format!("duplicate constraint on `{}`", tokens[0])));
            }
            items.push((tokens[0].to_owned(), parse_real(line, tokens[1])?));
        }
        Self::new(items)
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint<T>> {
        self.constraints.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.constraints.iter().map(|c| c.observable.clone()).collect()
    }

    pub fn targets(&self) -> Vec<T> {
        self.constraints.iter().map(|c| c.target).collect()
    }

    /// Looks up every constrained observable in `sys`.
    pub fn resolve<'s>(&self, sys: &'s DiscreteSystem<T>) -> Result<Vec<&'s [T]>> {
        self.constraints
            .iter()
            .map(|c| sys.observable(&c.observable))
            .collect()
    }
}
