//! Run-length encoded compositions of global and local Grover operators.
//!
//! Sequences are stored in *application order*: the first run acts on the
//! initial state first. Two text forms are supported:
//!
//! * tokens, also in application order: `g:4,l:2,g:1`;
//! * operator-product notation, written right to left as a matrix product:
//!   the same sequence renders as `G_8G_2^2G_8^4` for `n = 8, m = 2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::search_space::SearchSpace;

/// Which Grover operator a query applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    /// Oracle followed by the diffusion over the whole database.
    Global,
    /// Oracle followed by the diffusion inside every block.
    Local,
}

impl OperatorKind {
    fn token(self) -> &'static str {
        match self {
            OperatorKind::Global => "g",
            OperatorKind::Local => "l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub kind: OperatorKind,
    pub count: u64,
}

/// Canonical run-length form: no empty runs, adjacent runs differ in kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OperatorSequence {
    runs: Vec<Run>,
}

impl OperatorSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sequence from arbitrary runs, dropping empty ones and merging
    /// neighbours of the same kind.
    pub fn from_runs<I: IntoIterator<Item = (OperatorKind, u64)>>(runs: I) -> Self {
        let mut seq = Self::new();
        for (kind, count) in runs {
            seq.push(kind, count);
        }
        seq
    }

    pub fn from_kinds<I: IntoIterator<Item = OperatorKind>>(kinds: I) -> Self {
        Self::from_runs(kinds.into_iter().map(|k| (k, 1)))
    }

    /// Decodes `len` bits, bit `i` giving the kind of the `i`-th applied
    /// query (`0` = global, `1` = local).
    pub fn from_bits(bits: u64, len: u32) -> Self {
        Self::from_kinds((0..len).map(|i| {
            if bits >> i & 1 == 1 {
                OperatorKind::Local
            } else {
                OperatorKind::Global
            }
        }))
    }

    pub fn global(count: u64) -> Self {
        Self::from_runs([(OperatorKind::Global, count)])
    }

    pub fn local(count: u64) -> Self {
        Self::from_runs([(OperatorKind::Local, count)])
    }

    /// The three-stage sequence `G_n G_m^k2 G_n^k1`: `k1` global queries,
    /// then `k2` local ones, then a single global query.
    pub fn grk(k1: u64, k2: u64) -> Self {
        Self::from_runs([
            (OperatorKind::Global, k1),
            (OperatorKind::Local, k2),
            (OperatorKind::Global, 1),
        ])
    }

    /// Appends `count` applications of `kind`.
    pub fn push(&mut self, kind: OperatorKind, count: u64) {
        if count == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some(last) if last.kind == kind => last.count += count,
            _ => self.runs.push(Run { kind, count }),
        }
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Total number of oracle queries.
    pub fn total_queries(&self) -> u64 {
        self.runs.iter().map(|r| r.count).sum()
    }

    /// Drops a final local run. It cannot change the block probability, so
    /// the result lies in the same equivalence class.
    pub fn without_trailing_local(&self) -> Self {
        let mut runs = self.runs.clone();
        if runs.last().map(|r| r.kind) == Some(OperatorKind::Local) {
            runs.pop();
        }
        Self { runs }
    }

    pub fn last_kind(&self) -> Option<OperatorKind> {
        self.runs.last().map(|r| r.kind)
    }

    /// Expands the runs into one kind per query, in application order.
    pub fn kinds(&self) -> impl Iterator<Item = OperatorKind> + '_ {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.kind, r.count as usize))
    }

    /// Token form, e.g. `g:4,l:2,g:1`. The empty sequence renders as `""`.
    pub fn to_tokens(&self) -> String {
        self.runs
            .iter()
            .map(|r| format!("{}:{}", r.kind.token(), r.count))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the token form. Whitespace around tokens is ignored and a bare
    /// `g` or `l` means a count of one.
    pub fn parse_tokens(input: &str) -> Result<Self> {
        let err = |reason: String| Error::Parse {
            input: input.to_string(),
            reason,
        };
        let mut seq = Self::new();
        if input.trim().is_empty() {
            return Ok(seq);
        }
        for raw in input.split(',') {
            let token = raw.trim();
            let (kind, count) = match token.split_once(':') {
                Some((k, c)) => (k.trim(), c.trim()),
                None => (token, "1"),
            };
            let kind = match kind {
                "g" | "G" => OperatorKind::Global,
                "l" | "L" => OperatorKind::Local,
                other => return Err(err(format!("unknown operator {other:?}, expected g or l"))),
            };
            let count: u64 = count
                .parse()
                .map_err(|_| err(format!("invalid count {count:?}")))?;
            seq.push(kind, count);
        }
        Ok(seq)
    }

    /// Operator-product notation, last applied operator first:
    /// `G_8G_2G_8^6`. The empty sequence renders as `I`.
    pub fn to_product(&self, space: &SearchSpace) -> String {
        if self.is_empty() {
            return "I".to_string();
        }
        let mut out = String::new();
        for run in self.runs.iter().rev() {
            let index = match run.kind {
                OperatorKind::Global => space.n(),
                OperatorKind::Local => space.m(),
            };
            out.push_str(&format!("G_{index}"));
            if run.count > 1 {
                out.push_str(&format!("^{}", run.count));
            }
        }
        out
    }

    /// Parses operator-product notation produced by [`Self::to_product`].
    pub fn parse_product(input: &str, space: &SearchSpace) -> Result<Self> {
        let err = |reason: String| Error::Parse {
            input: input.to_string(),
            reason,
        };
        let text: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if text == "I" || text.is_empty() {
            return Ok(Self::new());
        }
        let bytes = text.as_bytes();
        let mut pos = 0;
        let read_number = |pos: &mut usize| -> Option<u64> {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            text[start..*pos].parse().ok()
        };
        let mut factors = Vec::new();
        while pos < bytes.len() {
            if !text[pos..].starts_with("G_") {
                return Err(err(format!("expected 'G_' at offset {pos}")));
            }
            pos += 2;
            let index =
                read_number(&mut pos).ok_or_else(|| err("missing operator index".into()))?;
            let kind = if index == space.n() as u64 {
                OperatorKind::Global
            } else if index == space.m() as u64 {
                OperatorKind::Local
            } else {
                return Err(err(format!(
                    "operator index {index} matches neither n = {} nor m = {}",
                    space.n(),
                    space.m()
                )));
            };
            let mut count = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                count = read_number(&mut pos).ok_or_else(|| err("missing exponent".into()))?;
            }
            factors.push((kind, count));
        }
        factors.reverse();
        Ok(Self::from_runs(factors))
    }
}

impl fmt::Display for OperatorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tokens())
    }
}

impl FromStr for OperatorSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_tokens(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(n: u32, m: u32) -> SearchSpace {
        SearchSpace::new(n, m).unwrap()
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let seq = OperatorSequence::from_runs([
            (OperatorKind::Global, 2),
            (OperatorKind::Global, 1),
            (OperatorKind::Local, 0),
            (OperatorKind::Global, 4),
        ]);
        assert_eq!(seq.runs().len(), 1);
        assert_eq!(seq.total_queries(), 7);
        assert_eq!(OperatorSequence::grk(3, 0), OperatorSequence::global(4));
    }

    #[test]
    fn product_notation_matches_tables() {
        let s = space(8, 2);
        assert_eq!(OperatorSequence::grk(6, 1).to_product(&s), "G_8G_2G_8^6");
        assert_eq!(OperatorSequence::grk(0, 1).to_product(&s), "G_8G_2");
        assert_eq!(OperatorSequence::new().to_product(&s), "I");
        let tokens: OperatorSequence = "g:4,l:2,g:1".parse().unwrap();
        assert_eq!(tokens.to_product(&s), "G_8G_2^2G_8^4");
    }

    #[test]
    fn parse_product_reverses_order() {
        let s = space(8, 7);
        let seq = OperatorSequence::parse_product("G_8G_7^6G_8G_7", &s).unwrap();
        assert_eq!(seq.to_tokens(), "l:1,g:1,l:6,g:1");
        assert!(OperatorSequence::parse_product("G_5", &s).is_err());
        assert!(OperatorSequence::parse_product("G_8^", &s).is_err());
        assert!(OperatorSequence::parse_product("H_8", &s).is_err());
    }

    #[test]
    fn token_errors() {
        assert!("x:1".parse::<OperatorSequence>().is_err());
        assert!("g:-1".parse::<OperatorSequence>().is_err());
        assert!("".parse::<OperatorSequence>().unwrap().is_empty());
        assert_eq!(
            "g, l ,g:2".parse::<OperatorSequence>().unwrap().to_tokens(),
            "g:1,l:1,g:2"
        );
    }

    #[test]
    fn bits_follow_application_order() {
        // bits: 0 -> G, 1 -> L, 0 -> G (bit 1 set)
        let seq = OperatorSequence::from_bits(0b010, 3);
        assert_eq!(seq.to_tokens(), "g:1,l:1,g:1");
        assert_eq!(seq.kinds().count(), 3);
        assert_eq!(seq.without_trailing_local(), seq);
        let padded: OperatorSequence = "g:2,l:3".parse().unwrap();
        assert_eq!(padded.without_trailing_local(), OperatorSequence::global(2));
    }

    fn arb_sequence() -> impl Strategy<Value = OperatorSequence> {
        prop::collection::vec((any::<bool>(), 0u64..20), 0..12).prop_map(|runs| {
            OperatorSequence::from_runs(runs.into_iter().map(|(local, c)| {
                (
                    if local {
                        OperatorKind::Local
                    } else {
                        OperatorKind::Global
                    },
                    c,
                )
            }))
        })
    }

    proptest! {
        #[test]
        fn text_forms_round_trip(seq in arb_sequence(), n in 2u32..20, m_frac in 0.0f64..1.0) {
            let m = ((n as f64 - 1.0) * m_frac) as u32;
            let s = space(n, m);
            prop_assert_eq!(OperatorSequence::parse_tokens(&seq.to_tokens()).unwrap(), seq.clone());
            prop_assert_eq!(OperatorSequence::parse_product(&seq.to_product(&s), &s).unwrap(), seq.clone());
            for w in seq.runs().windows(2) {
                prop_assert_ne!(w[0].kind, w[1].kind);
            }
        }
    }
}
