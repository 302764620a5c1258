//! Linear rank inequalities: expressions in conditional entropies and
//! mutual informations, their expansion into joint entropies, evaluation on
//! subspace assignments, and searches for violating assignments.
//!
//! Inequalities are stored as `LHS <= RHS` and evaluated as the slack
//! `RHS - LHS`; a violation is a negative slack.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{One, Signed, ToPrimitive, Zero};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ff::{FieldError, Matrix, PrimeField};
use crate::parallel::pool;
use crate::rateregion::{format_rational, int, parse_rational, Rational, TransferCoefficients};
use crate::subspace::{Subspace, SubspaceAssignment, SubspaceError, SubspaceTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown inequality `{0}`")]
    UnknownInequality(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{size} assignments exceed the search budget of {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("scalars must be distinct, {0} is repeated")]
    RepeatedScalar(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type VarSet = BTreeSet<String>;

fn set_text(s: &VarSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

/// `H(S|T)` or `I(S;T|U)`; empty conditioning sets are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    H { s: VarSet, t: VarSet },
    I { s: VarSet, t: VarSet, u: VarSet },
}

impl Atom {
    pub fn entropy(s: &[&str], t: &[&str]) -> Atom {
        Atom::H {
            s: names(s),
            t: names(t),
        }
    }

    pub fn mutual(s: &[&str], t: &[&str], u: &[&str]) -> Atom {
        Atom::I {
            s: names(s),
            t: names(t),
            u: names(u),
        }
    }

    pub fn variables(&self) -> VarSet {
        match self {
            Atom::H { s, t } => s.union(t).cloned().collect(),
            Atom::I { s, t, u } => s.iter().chain(t).chain(u).cloned().collect(),
        }
    }

    /// Expansion into joint entropies; the empty set is dropped.
    pub fn expand(&self) -> Vec<(i64, VarSet)> {
        let u2 = |a: &VarSet, b: &VarSet| a.union(b).cloned().collect::<VarSet>();
        match self {
            Atom::H { s, t } => vec![(1, u2(s, t)), (-1, t.clone())],
            Atom::I { s, t, u } => vec![
                (1, u2(s, u)),
                (1, u2(t, u)),
                (-1, u2(&u2(s, t), u)),
                (-1, u.clone()),
            ],
        }
    }

    /// Rank value computed with intersections:
    /// `H(S|T) = dim S' - dim(S' ∩ T')` and
    /// `I(S;T|U) = dim((S'+U') ∩ (T'+U')) - dim U'`, where primes denote
    /// joint spans.
    pub fn evaluate_by_meets(&self, assign: &SubspaceAssignment) -> Result<usize, RankError> {
        let span = |v: &VarSet| joint(assign, v);
        Ok(match self {
            Atom::H { s, t } => {
                let a = span(s)?;
                let b = span(t)?;
                a.dim() - a.meet(&b)?.dim()
            }
            Atom::I { s, t, u } => {
                let uu = span(u)?;
                let a = span(s)?.join(&uu)?;
                let b = span(t)?.join(&uu)?;
                a.meet(&b)?.dim() - uu.dim()
            }
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::H { s, t } if t.is_empty() => write!(f, "H({})", set_text(s)),
            Atom::H { s, t } => write!(f, "H({}|{})", set_text(s), set_text(t)),
            Atom::I { s, t, u } if u.is_empty() => write!(f, "I({};{})", set_text(s), set_text(t)),
            Atom::I { s, t, u } => write!(f, "I({};{}|{})", set_text(s), set_text(t), set_text(u)),
        }
    }
}

fn names(v: &[&str]) -> VarSet {
    v.iter().map(|s| s.to_string()).collect()
}

fn joint(assign: &SubspaceAssignment, vars: &VarSet) -> Result<Subspace, RankError> {
    if let Some(v) = vars.iter().find(|v| assign.get(v).is_none()) {
        return Err(RankError::UnknownVariable(v.clone()));
    }
    let list: Vec<&String> = vars.iter().collect();
    Ok(assign.joint(&list)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub atom: Atom,
}

/// An inequality `Σ lhs <= Σ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyExpression {
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
}

/// Joint-entropy coefficients of the slack `RHS - LHS`, zeros dropped.
pub type CanonicalExpression = BTreeMap<VarSet, Rational>;

impl EntropyExpression {
    /// Slack terms: right side positive, left side negated.
    pub fn slack_terms(&self) -> Vec<Term> {
        self.rhs
            .iter()
            .cloned()
            .chain(self.lhs.iter().map(|t| Term {
                coeff: -t.coeff.clone(),
                atom: t.atom.clone(),
            }))
            .collect()
    }

    pub fn variables(&self) -> VarSet {
        self.lhs
            .iter()
            .chain(&self.rhs)
            .flat_map(|t| t.atom.variables())
            .collect()
    }

    pub fn canonicalize(&self) -> CanonicalExpression {
        canonicalize(&self.slack_terms())
    }

    /// Slack through the joint-entropy expansion.
    pub fn evaluate(&self, assign: &SubspaceAssignment) -> Result<Rational, RankError> {
        let mut total = Rational::zero();
        for (set, c) in self.canonicalize() {
            total += c * int(joint(assign, &set)?.dim() as i64);
        }
        Ok(total)
    }

    /// Slack evaluated atom by atom through intersections.
    pub fn evaluate_atoms(&self, assign: &SubspaceAssignment) -> Result<Rational, RankError> {
        let mut total = Rational::zero();
        for t in self.slack_terms() {
            total += t.coeff.clone() * int(t.atom.evaluate_by_meets(assign)? as i64);
        }
        Ok(total)
    }

    /// Text in the expression file format.
    pub fn to_text(&self) -> String {
        let side = |terms: &[Term]| -> String {
            terms
                .iter()
                .map(|t| {
                    let sign = if t.coeff.is_negative() { '-' } else { '+' };
                    format!("{sign}{} * {}\n", format_rational(&t.coeff.abs()), t.atom)
                })
                .collect()
        };
        format!("LHS:\n{}RHS:\n{}", side(&self.lhs), side(&self.rhs))
    }

    /// Parses `LHS:` and `RHS:` sections of lines `±coeff * H(S|T)` or
    /// `±coeff * I(S;T|U)`. The coefficient and `*` may be omitted; `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self, RankError> {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        let mut side: Option<bool> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.to_ascii_uppercase().as_str() {
                "LHS:" => {
                    side = Some(false);
                    continue;
                }
                "RHS:" => {
                    side = Some(true);
                    continue;
                }
                _ => {}
            }
            let on_rhs = side.ok_or(RankError::Parse {
                line: line_no,
                msg: "term before any LHS:/RHS: header".into(),
            })?;
            let term = parse_term(line).map_err(|msg| RankError::Parse { line: line_no, msg })?;
            if on_rhs {
                rhs.push(term);
            } else {
                lhs.push(term);
            }
        }
        if side.is_none() {
            return Err(RankError::Parse {
                line: 0,
                msg: "no LHS:/RHS: sections".into(),
            });
        }
        Ok(EntropyExpression { lhs, rhs })
    }
}

impl fmt::Display for EntropyExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |terms: &[Term]| -> String {
            if terms.is_empty() {
                return "0".into();
            }
            let mut s = String::new();
            for (i, t) in terms.iter().enumerate() {
                let neg = t.coeff.is_negative();
                if i > 0 {
                    s.push_str(if neg { " - " } else { " + " });
                } else if neg {
                    s.push('-');
                }
                let mag = t.coeff.abs();
                if !mag.is_one() {
                    s.push_str(&format_rational(&mag));
                }
                s.push_str(&t.atom.to_string());
            }
            s
        };
        write!(f, "{} <= {}", side(&self.lhs), side(&self.rhs))
    }
}

fn parse_set(s: &str) -> Result<VarSet, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(VarSet::new());
    }
    s.split(',')
        .map(|v| {
            let v = v.trim();
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                Err(format!("bad variable name `{v}`"))
            } else {
                Ok(v.to_string())
            }
        })
        .collect()
}

fn parse_term(line: &str) -> Result<Term, String> {
    let open = line.find(['H', 'I']).ok_or("expected H(...) or I(...)")?;
    let (prefix, atom_text) = line.split_at(open);
    let mut p: String = prefix.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(stripped) = p.strip_suffix('*') {
        p = stripped.to_string();
    }
    let coeff = match p.as_str() {
        "" | "+" => int(1),
        "-" => int(-1),
        other => {
            let (neg, body) = match other.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, other.strip_prefix('+').unwrap_or(other)),
            };
            let c = parse_rational(body).ok_or(format!("bad coefficient `{other}`"))?;
            if neg {
                -c
            } else {
                c
            }
        }
    };
    let kind = &atom_text[..1];
    let inner = atom_text[1..]
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.trim_end().strip_suffix(')'))
        .ok_or("expected parentheses")?;
    let (main, cond) = match inner.split_once('|') {
        Some((m, c)) => (m, parse_set(c)?),
        None => (inner, VarSet::new()),
    };
    let atom = if kind == "H" {
        let s = parse_set(main)?;
        if s.is_empty() {
            return Err("H needs at least one variable".into());
        }
        Atom::H { s, t: cond }
    } else {
        let (a, b) = main.split_once(';').ok_or("I needs `;` between its arguments")?;
        let (s, t) = (parse_set(a)?, parse_set(b)?);
        if s.is_empty() || t.is_empty() {
            return Err("I needs variables on both sides of `;`".into());
        }
        Atom::I { s, t, u: cond }
    };
    Ok(Term { coeff, atom })
}

pub fn canonicalize(terms: &[Term]) -> CanonicalExpression {
    let mut out = CanonicalExpression::new();
    for t in terms {
        for (sign, set) in t.atom.expand() {
            if set.is_empty() {
                continue;
            }
            *out.entry(set).or_insert_with(Rational::zero) += t.coeff.clone() * int(sign);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn evaluate(e: &EntropyExpression, assign: &SubspaceAssignment) -> Result<Rational, RankError> {
    e.evaluate(assign)
}

/// Four-variable inequality in the transfer coefficient form, over
/// variables A, B, C, D.
pub fn from_transfer(c: &TransferCoefficients) -> EntropyExpression {
    let atoms = [
        Atom::mutual(&["A"], &["B"], &[]),
        Atom::mutual(&["A"], &["B"], &["C"]),
        Atom::mutual(&["A"], &["C"], &["B"]),
        Atom::mutual(&["B"], &["C"], &["A"]),
        Atom::mutual(&["A"], &["B"], &["D"]),
        Atom::mutual(&["A"], &["D"], &["B"]),
        Atom::mutual(&["B"], &["D"], &["A"]),
        Atom::mutual(&["C"], &["D"], &[]),
        Atom::mutual(&["C"], &["D"], &["A"]),
        Atom::mutual(&["C"], &["D"], &["B"]),
    ];
    let mut terms = atoms.into_iter().zip(c.0.iter()).map(|(atom, coeff)| Term {
        coeff: coeff.clone(),
        atom,
    });
    let lhs = terms.next().into_iter().collect();
    let rhs = terms.filter(|t| !t.coeff.is_zero()).collect();
    EntropyExpression { lhs, rhs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InequalityId {
    #[serde(rename = "ingleton")]
    Ingleton,
    #[serde(rename = "zhang-yeung")]
    ZhangYeung,
    #[serde(rename = "oddLRI")]
    OddLri,
    #[serde(rename = "evenLRI")]
    EvenLri,
    #[serde(rename = "oddLRI-balanced")]
    OddLriBalanced,
}

impl InequalityId {
    pub const ALL: [InequalityId; 5] = [
        InequalityId::Ingleton,
        InequalityId::ZhangYeung,
        InequalityId::OddLri,
        InequalityId::EvenLri,
        InequalityId::OddLriBalanced,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Ingleton => "ingleton",
            InequalityId::ZhangYeung => "zhang-yeung",
            InequalityId::OddLri => "oddLRI",
            InequalityId::EvenLri => "evenLRI",
            InequalityId::OddLriBalanced => "oddLRI-balanced",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = RankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let l = s.to_ascii_lowercase();
        match l.as_str() {
            "zy" | "zhangyeung" | "zhang_yeung" => return Ok(InequalityId::ZhangYeung),
            "odd" | "oddlri" => return Ok(InequalityId::OddLri),
            "even" | "evenlri" => return Ok(InequalityId::EvenLri),
            _ => {}
        }
        InequalityId::ALL
            .into_iter()
            .find(|i| i.as_str().to_ascii_lowercase() == l)
            .ok_or_else(|| RankError::UnknownInequality(s.to_string()))
    }
}

const INGLETON: &str = "\
LHS:
I(A;B)
RHS:
I(A;B|C)
I(A;B|D)
I(C;D)
";

const ZHANG_YEUNG: &str = "\
LHS:
I(A;B)
RHS:
2 * I(A;B|C)
I(A;C|B)
I(B;C|A)
I(A;B|D)
I(C;D)
";

const ODD_LRI: &str = "\
LHS:
2 * H(A)
H(B)
2 * H(C)
RHS:
H(W)
H(X)
H(Y)
H(Z)
2 * H(A|Z,Y)
H(B|X,Z)
2 * H(C|A,X)
3 * H(X|W,Y)
3 * H(Z|W,C)
5 * H(W|A,B)
5 * H(Y|B,C)
5 * H(A)
5 * H(B)
5 * H(C)
-5 * H(A,B,C)
";

const EVEN_LRI: &str = "\
LHS:
2 * H(A)
3 * H(B)
2 * H(C)
RHS:
H(W)
H(X)
H(Y)
3 * H(Z)
2 * H(A|Y,Z)
3 * H(B|X,Z)
H(C|W,Z)
2 * H(W|A,B)
4 * H(X|A,C)
3 * H(Y|B,C)
6 * H(Z|A,B,C)
H(C|W,X,Y)
7 * H(A)
7 * H(B)
7 * H(C)
-7 * H(A,B,C)
";

// each of W, X, Y, Z replaced by its intersection with the span of the
// other six variables
const ODD_LRI_BALANCED: &str = "\
LHS:
2 * H(A)
H(B)
2 * H(C)
RHS:
I(W;A,B,C,X,Y,Z)
I(X;A,B,C,W,Y,Z)
I(Y;A,B,C,W,X,Z)
I(Z;A,B,C,W,X,Y)
2 * H(A|Z,Y)
H(B|X,Z)
2 * H(C|A,X)
3 * I(X;A,B,C,Z|W,Y)
3 * I(Z;A,B,X,Y|W,C)
5 * I(W;C,X,Y,Z|A,B)
5 * I(Y;A,W,X,Z|B,C)
5 * H(A)
5 * H(B)
5 * H(C)
-5 * H(A,B,C)
";

pub fn builtin_inequality(id: InequalityId) -> EntropyExpression {
    let text = match id {
        InequalityId::Ingleton => INGLETON,
        InequalityId::ZhangYeung => ZHANG_YEUNG,
        InequalityId::OddLri => ODD_LRI,
        InequalityId::EvenLri => EVEN_LRI,
        InequalityId::OddLriBalanced => ODD_LRI_BALANCED,
    };
    EntropyExpression::parse(text).expect("builtin inequality text")
}

/// Whether the inequality is known to hold for every assignment of
/// subspaces of GF(q)^d.
pub fn claimed_valid(id: InequalityId, q: u32, d: usize) -> bool {
    match id {
        InequalityId::Ingleton | InequalityId::ZhangYeung => true,
        InequalityId::OddLri | InequalityId::OddLriBalanced => q % 2 == 1 || d <= 2,
        InequalityId::EvenLri => q == 2 || d <= 2,
    }
}

/// Bundled assignments: the coordinate axes A, B, C with W, X, Y, Z spanned
/// by 110, 101, 011 and 111, padded with zero coordinates when d > 3.
pub fn catalog_assignments(q: u32, d: usize) -> Result<Vec<SubspaceAssignment>, RankError> {
    if d < 3 {
        return Ok(Vec::new());
    }
    let field = PrimeField::new(q)?;
    let v = |bits: [i64; 3]| {
        let mut x = vec![0i64; d];
        x[..3].copy_from_slice(&bits);
        vec![x]
    };
    let a = SubspaceAssignment::new(field, d)
        .with("A", &v([1, 0, 0]))?
        .with("B", &v([0, 1, 0]))?
        .with("C", &v([0, 0, 1]))?
        .with("W", &v([1, 1, 0]))?
        .with("X", &v([1, 0, 1]))?
        .with("Y", &v([0, 1, 1]))?
        .with("Z", &v([1, 1, 1]))?;
    Ok(vec![a])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Catalog,
    Exhaustive { budget: u64 },
    Sample { seed: u64, samples: u64 },
}

pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone)]
pub struct Violation {
    pub assignment: SubspaceAssignment,
    pub slack: Rational,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub violation: Option<Violation>,
    pub checked: u64,
}

/// Slack evaluator over subspace indices of a [`SubspaceTable`]: integer
/// coefficients (scaled by a positive common denominator) on variable
/// bitmasks.
struct FastSlack {
    terms: Vec<(i64, Vec<usize>)>,
}

impl FastSlack {
    fn new(canon: &CanonicalExpression, vars: &[String]) -> Self {
        let lcm = canon
            .values()
            .fold(num::BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()));
        let terms = canon
            .iter()
            .map(|(set, c)| {
                let scaled = (c * Rational::from_integer(lcm.clone())).to_integer();
                let idx = set
                    .iter()
                    .map(|v| vars.iter().position(|x| x == v).expect("expression variable"))
                    .collect();
                (scaled.to_i64().expect("small coefficient"), idx)
            })
            .collect();
        FastSlack { terms }
    }

    /// Sign-preserving multiple of the slack.
    fn eval(&self, table: &SubspaceTable, choice: &[usize]) -> i64 {
        self.terms
            .iter()
            .map(|(c, idx)| c * table.joint_dim(idx.iter().map(|&i| choice[i])) as i64)
            .sum()
    }
}

fn assignment_from(
    table: &SubspaceTable,
    vars: &[String],
    choice: &[usize],
) -> Result<SubspaceAssignment, RankError> {
    let mut a = SubspaceAssignment::new(table.field(), table.ambient_dim());
    for (v, &i) in vars.iter().zip(choice) {
        a.insert(v, table.get(i).clone())?;
    }
    Ok(a)
}

/// Looks for an assignment of subspaces of GF(q)^d with negative slack.
///
/// Exhaustive mode visits assignments in lexicographic order of the
/// enumerated subspace indices (variables sorted by name) and returns the
/// first violator. Sample mode draws each variable independently and
/// uniformly from the enumerated subspaces with SplitMix64 seeded by
/// `seed`, taking index `(x * len) >> 64` for each 64-bit output `x`, and
/// returns the first violating draw.
pub fn search_violation(
    e: &EntropyExpression,
    q: u32,
    d: usize,
    mode: SearchMode,
) -> Result<SearchOutcome, RankError> {
    let vars: Vec<String> = e.variables().into_iter().collect();
    match mode {
        SearchMode::Catalog => {
            let mut checked = 0;
            for a in catalog_assignments(q, d)? {
                if vars.iter().any(|v| a.get(v).is_none()) {
                    continue;
                }
                checked += 1;
                let slack = e.evaluate(&a)?;
                if slack.is_negative() {
                    return Ok(SearchOutcome {
                        violation: Some(Violation { assignment: a, slack }),
                        checked,
                    });
                }
            }
            Ok(SearchOutcome {
                violation: None,
                checked,
            })
        }
        SearchMode::Exhaustive { budget } => {
            let table = SubspaceTable::new(q, d)?;
            let n = table.len() as u128;
            let size = n.checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
            if size > budget as u128 {
                return Err(RankError::BudgetExceeded { size, budget });
            }
            let fast = FastSlack::new(&e.canonicalize(), &vars);
            let total = size as u64;
            let len = table.len() as u64;
            let decode = |mut idx: u64| {
                let mut c = vec![0usize; vars.len()];
                for slot in c.iter_mut().rev() {
                    *slot = (idx % len) as usize;
                    idx /= len;
                }
                c
            };
            const BLOCK: u64 = 1 << 14;
            let found = pool().install(|| {
                (0..total.div_ceil(BLOCK)).into_par_iter().find_map_first(|b| {
                    (b * BLOCK..((b + 1) * BLOCK).min(total))
                        .find(|&i| fast.eval(&table, &decode(i)) < 0)
                })
            });
            finish(e, &table, &vars, found.map(|i| decode(i)), total)
        }
        SearchMode::Sample { seed, samples } => {
            let table = SubspaceTable::new(q, d)?;
            let mut rng = SplitMix64::seed_from_u64(seed);
            let len = table.len() as u128;
            let choices: Vec<Vec<usize>> = (0..samples)
                .map(|_| {
                    vars.iter()
                        .map(|_| ((rng.next_u64() as u128 * len) >> 64) as usize)
                        .collect()
                })
                .collect();
            let fast = FastSlack::new(&e.canonicalize(), &vars);
            let found = pool().install(|| {
                choices
                    .par_iter()
                    .find_first(|c| fast.eval(&table, c) < 0)
                    .cloned()
            });
            finish(e, &table, &vars, found, samples)
        }
    }
}

fn finish(
    e: &EntropyExpression,
    table: &SubspaceTable,
    vars: &[String],
    found: Option<Vec<usize>>,
    checked: u64,
) -> Result<SearchOutcome, RankError> {
    let violation = match found {
        Some(c) => {
            let assignment = assignment_from(table, vars, &c)?;
            let slack = e.evaluate(&assignment)?;
            Some(Violation { assignment, slack })
        }
        None => None,
    };
    Ok(SearchOutcome { violation, checked })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankLemmaOutcome {
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
}

/// For a k×k matrix M, an r×k matrix N and distinct scalars λ_1..λ_t,
/// compares `Σ rank([M - λ_i I; N])` with `(t-1)k + rank(N)`.
pub fn check_rank_sum_lemma(m: &Matrix, n: &Matrix, lambdas: &[u32]) -> Result<RankLemmaOutcome, RankError> {
    let k = m.rows();
    if m.cols() != k {
        return Err(RankError::Shape(format!("M is {}x{}, expected square", k, m.cols())));
    }
    if n.cols() != k {
        return Err(RankError::Shape(format!("N has {} columns, expected {k}", n.cols())));
    }
    if m.field() != n.field() {
        return Err(FieldError::FieldMismatch(m.field().modulus(), n.field().modulus()).into());
    }
    let f = m.field();
    let mut seen = BTreeSet::new();
    for &l in lambdas {
        if !seen.insert(f.reduce(l as i64)) {
            return Err(RankError::RepeatedScalar(l));
        }
    }
    let id = Matrix::identity(f, k);
    let mut lhs = 0;
    for &l in lambdas {
        let shifted = m.add(&id.scale(f.neg(f.reduce(l as i64))))?;
        lhs += shifted.stack(n)?.rank();
    }
    let t = lambdas.len();
    let rhs = t.saturating_sub(1) * k + n.rank();
    Ok(RankLemmaOutcome {
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rateregion::rat;

    fn set(v: &[&str]) -> VarSet {
        names(v)
    }

    #[test]
    fn canonical_forms() {
        let h = EntropyExpression {
            lhs: vec![],
            rhs: vec![Term {
                coeff: int(1),
                atom: Atom::entropy(&["A"], &["B"]),
            }],
        };
        let c = h.canonicalize();
        assert_eq!(c[&set(&["A", "B"])], int(1));
        assert_eq!(c[&set(&["B"])], int(-1));
        assert_eq!(c.len(), 2);
        let i = EntropyExpression::parse("LHS:\nRHS:\nI(A;B|C)\n").unwrap().canonicalize();
        assert_eq!(i[&set(&["A", "C"])], int(1));
        assert_eq!(i[&set(&["B", "C"])], int(1));
        assert_eq!(i[&set(&["A", "B", "C"])], int(-1));
        assert_eq!(i[&set(&["C"])], int(-1));
    }

    #[test]
    fn odd_lri_compound_coefficient() {
        let e = builtin_inequality(InequalityId::OddLri);
        // only the compound term touches {A,B,C} directly
        assert_eq!(e.canonicalize()[&set(&["A", "B", "C"])], int(-5));
        assert!(!e.variables().contains("D"));
        assert_eq!(e.variables().len(), 7);
        let text = e.to_string();
        assert!(text.contains("3H(X|W,Y)") && text.contains("5H(W|A,B)"));
        let ev = builtin_inequality(InequalityId::EvenLri).to_string();
        assert!(ev.contains("6H(Z|A,B,C)") && ev.contains("H(C|W,X,Y)"));
    }

    #[test]
    fn ingleton_shape() {
        let e = builtin_inequality(InequalityId::Ingleton);
        assert_eq!(e.variables().len(), 4);
        assert_eq!(e.rhs.len(), 3);
        assert_eq!(e.lhs.len() + e.rhs.len(), 4);
    }

    #[test]
    fn transfer_form_matches_builtins() {
        let cases = [
            (TransferCoefficients::ingleton(), InequalityId::Ingleton),
            (TransferCoefficients::zhang_yeung(), InequalityId::ZhangYeung),
        ];
        for (c, id) in cases {
            assert_eq!(from_transfer(&c).canonicalize(), builtin_inequality(id).canonicalize(), "{id}");
        }
    }

    #[test]
    fn catalog_slacks() {
        let odd = builtin_inequality(InequalityId::OddLri);
        let even = builtin_inequality(InequalityId::EvenLri);
        let a2 = &catalog_assignments(2, 3).unwrap()[0];
        let a3 = &catalog_assignments(3, 3).unwrap()[0];
        assert_eq!(odd.evaluate(a2).unwrap(), int(-1));
        assert_eq!(even.evaluate(a3).unwrap(), int(-1));
        assert!(odd.evaluate(a3).unwrap() >= int(0));
        assert!(even.evaluate(a2).unwrap() >= int(0));
        let a25 = &catalog_assignments(2, 5).unwrap()[0];
        assert_eq!(odd.evaluate(a25).unwrap(), int(-1));
    }

    #[test]
    fn self_information_is_dimension() {
        let f = PrimeField::new(2).unwrap();
        let a = SubspaceAssignment::new(f, 3)
            .with("A", &[vec![1, 0, 0]])
            .unwrap()
            .with("B", &[vec![1, 0, 0]])
            .unwrap();
        let e = EntropyExpression::parse("LHS:\nRHS:\nI(A;B)").unwrap();
        assert_eq!(e.evaluate(&a).unwrap(), int(1));
        assert_eq!(e.evaluate_atoms(&a).unwrap(), int(1));
    }

    #[test]
    fn parse_round_trip_and_errors() {
        for id in InequalityId::ALL {
            let e = builtin_inequality(id);
            assert_eq!(EntropyExpression::parse(&e.to_text()).unwrap(), e);
        }
        let e = EntropyExpression::parse("LHS:\n+1/2 * H(A)\nRHS:\n-3*I(A;B|C) # note\n").unwrap();
        assert_eq!(e.lhs[0].coeff, rat(1, 2));
        assert_eq!(e.rhs[0].coeff, int(-3));
        assert!(EntropyExpression::parse("H(A)").is_err());
        assert!(EntropyExpression::parse("LHS:\nI(A)").is_err());
        assert!(EntropyExpression::parse("LHS:\nH(|B)").is_err());
        assert!(EntropyExpression::parse("LHS:\nx * H(A)").is_err());
        let f = PrimeField::new(2).unwrap();
        let a = SubspaceAssignment::new(f, 2).with("A", &[vec![1, 0]]).unwrap();
        assert!(matches!(
            builtin_inequality(InequalityId::Ingleton).evaluate(&a),
            Err(RankError::UnknownVariable(_))
        ));
    }

    #[test]
    fn small_exhaustive_scans() {
        let odd = builtin_inequality(InequalityId::OddLri);
        let out = search_violation(&odd, 2, 2, SearchMode::Exhaustive { budget: DEFAULT_BUDGET }).unwrap();
        assert!(out.violation.is_none());
        assert_eq!(out.checked, 5u64.pow(7));
        let ing = builtin_inequality(InequalityId::Ingleton);
        let out = search_violation(&ing, 2, 2, SearchMode::Exhaustive { budget: DEFAULT_BUDGET }).unwrap();
        assert!(out.violation.is_none());
        assert!(matches!(
            search_violation(&odd, 2, 3, SearchMode::Exhaustive { budget: 1000 }),
            Err(RankError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn exhaustive_returns_smallest_violator() {
        // H(A) <= 0 fails first at A = the first nonzero subspace
        let e = EntropyExpression::parse("LHS:\nH(A)\nRHS:\n").unwrap();
        let out = search_violation(&e, 2, 2, SearchMode::Exhaustive { budget: 100 }).unwrap();
        let v = out.violation.unwrap();
        let table = SubspaceTable::new(2, 2).unwrap();
        assert_eq!(v.assignment.get("A"), Some(table.get(1)));
        assert_eq!(v.slack, int(-1));
    }

    #[test]
    fn sampling_is_reproducible() {
        let e = EntropyExpression::parse("LHS:\nH(A,B)\nRHS:\nH(A)\n").unwrap();
        let run = |seed| {
            search_violation(&e, 3, 2, SearchMode::Sample { seed, samples: 200 })
                .unwrap()
                .violation
                .map(|v| v.assignment.to_text())
        };
        assert!(run(5).is_some());
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn catalog_mode() {
        let odd = builtin_inequality(InequalityId::OddLri);
        let out = search_violation(&odd, 2, 3, SearchMode::Catalog).unwrap();
        assert_eq!(out.violation.unwrap().slack, int(-1));
        assert!(search_violation(&odd, 3, 3, SearchMode::Catalog).unwrap().violation.is_none());
        assert!(search_violation(&odd, 2, 2, SearchMode::Catalog).unwrap().violation.is_none());
    }

    #[test]
    fn validity_table() {
        assert!(claimed_valid(InequalityId::OddLri, 3, 5));
        assert!(!claimed_valid(InequalityId::OddLri, 2, 3));
        assert!(claimed_valid(InequalityId::OddLri, 2, 2));
        assert!(claimed_valid(InequalityId::EvenLri, 2, 4));
        assert!(!claimed_valid(InequalityId::EvenLri, 5, 3));
        assert!(claimed_valid(InequalityId::Ingleton, 7, 4));
    }

    #[test]
    fn inequality_names() {
        for id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        }
        assert_eq!("ZY".parse::<InequalityId>().unwrap(), InequalityId::ZhangYeung);
        assert!("petersen".parse::<InequalityId>().is_err());
    }

    #[test]
    fn rank_sum_lemma_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let z = Matrix::zeros(f3, 1, 1);
        let out = check_rank_sum_lemma(&z, &z, &[0, 1]).unwrap();
        assert_eq!((out.lhs, out.rhs, out.holds), (1, 1, true));
        let f5 = PrimeField::new(5).unwrap();
        let i = Matrix::identity(f5, 2);
        let out = check_rank_sum_lemma(&i, &i, &[0, 1]).unwrap();
        assert_eq!((out.lhs, out.rhs, out.holds), (4, 4, true));
        assert!(matches!(
            check_rank_sum_lemma(&i, &i, &[1, 6]),
            Err(RankError::RepeatedScalar(6))
        ));
        assert!(check_rank_sum_lemma(&i, &Matrix::zeros(f5, 1, 3), &[0]).is_err());
    }
}
