//! Exact rational polyhedra: vertex enumeration, membership, capacities, the
//! catalog of network rate regions, and the Vámos transfer map.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netmodel::NetworkId;
use crate::parallel;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is empty")]
    Empty,
    #[error("no inequality bounds the all-ones direction")]
    NoDiagonalBound,
    #[error("the origin is not in the region")]
    OriginOutside,
    #[error("no {class} region is cataloged for {network}")]
    Unsupported { network: NetworkId, class: RegionClass },
    #[error("unknown region class `{0}`")]
    UnknownClass(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn format_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// `coeffs · x <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
}

impl HalfSpace {
    pub fn new(coeffs: Vec<Rational>, bound: Rational) -> Self {
        HalfSpace { coeffs, bound }
    }

    pub fn from_ints(coeffs: &[i64], bound: Rational) -> Self {
        HalfSpace {
            coeffs: coeffs.iter().map(|&c| int(c)).collect(),
            bound,
        }
    }

    /// All coefficients zero with a nonnegative bound.
    pub fn is_tautology(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero) && !self.bound.is_negative()
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.lhs(x) <= self.bound
    }

    pub fn is_tight_at(&self, x: &[Rational]) -> bool {
        self.lhs(x) == self.bound
    }

    /// Human form such as `r_a + 2r_b <= 5`, using the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (c, n) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if s.is_empty() {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            if !mag.is_one() {
                s.push_str(&format_rational(&mag));
            }
            s.push_str(n);
        }
        if s.is_empty() {
            s.push('0');
        }
        format!("{s} <= {}", format_rational(&self.bound))
    }
}

/// Inequality description of a polyhedron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
}

impl HRep {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self, RegionError> {
        for h in &halfspaces {
            if h.coeffs.len() != dim {
                return Err(RegionError::DimensionMismatch {
                    expected: dim,
                    got: h.coeffs.len(),
                });
            }
        }
        Ok(HRep { dim, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn with(mut self, extra: impl IntoIterator<Item = HalfSpace>) -> Result<Self, RegionError> {
        self.halfspaces.extend(extra);
        HRep::new(self.dim, self.halfspaces)
    }

    /// One inequality per line: `c1 c2 ... cm <= b`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<HRep, RegionError> {
        let mut dim = None;
        let mut hs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| RegionError::Parse { line: i + 1, msg };
            let (lhs, rhs) = line
                .split_once("<=")
                .ok_or_else(|| err(format!("expected `c1 ... cm <= b`, got `{line}`")))?;
            let coeffs: Vec<Rational> = lhs
                .split_whitespace()
                .map(|t| parse_rational(t).ok_or_else(|| err(format!("bad number `{t}`"))))
                .collect::<Result<_, _>>()?;
            if coeffs.is_empty() {
                return Err(err("no coefficients".into()));
            }
            let bound =
                parse_rational(rhs).ok_or_else(|| err(format!("bad bound `{}`", rhs.trim())))?;
            match dim {
                None => dim = Some(coeffs.len()),
                Some(d) if d != coeffs.len() => {
                    return Err(err(format!("expected {d} coefficients, got {}", coeffs.len())))
                }
                _ => {}
            }
            hs.push(HalfSpace::new(coeffs, bound));
        }
        let dim = dim.ok_or(RegionError::Parse {
            line: 0,
            msg: "no inequalities".into(),
        })?;
        HRep::new(dim, hs)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for h in &self.halfspaces {
            let c: Vec<String> = h.coeffs.iter().map(format_rational).collect();
            s.push_str(&format!("{} <= {}\n", c.join(" "), format_rational(&h.bound)));
        }
        s
    }

    fn check_point(&self, x: &[Rational]) -> Result<(), RegionError> {
        if x.len() != self.dim {
            return Err(RegionError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool, RegionError> {
        self.check_point(x)?;
        Ok(self.halfspaces.iter().all(|h| h.satisfied_by(x)))
    }

    /// Number of linearly independent inequalities tight at `x`.
    pub fn tight_rank(&self, x: &[Rational]) -> usize {
        let rows: Vec<Vec<Rational>> = self
            .halfspaces
            .iter()
            .filter(|h| h.is_tight_at(x))
            .map(|h| h.coeffs.clone())
            .collect();
        rational_rank(rows)
    }

    /// A feasible point with `dim` independent tight inequalities.
    pub fn is_vertex(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.halfspaces.iter().all(|h| h.satisfied_by(x))
            && self.tight_rank(x) == self.dim
    }

    /// The polytope `{d : A d <= 0, -1 <= d_i <= 1}`; it reduces to the
    /// origin exactly when the recession cone of `self` is trivial.
    fn recession_box(&self) -> Vec<HalfSpace> {
        let mut rows: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace::new(h.coeffs.clone(), Rational::zero()))
            .collect();
        rows.extend(box_rows(self.dim, 0));
        rows
    }

    pub fn is_bounded(&self) -> bool {
        let verts = basic_feasible_points(self.dim, &self.recession_box());
        verts.iter().all(|v| v.iter().all(Zero::is_zero))
    }

    /// Feasibility via the homogenised polytope
    /// `{(x,t) : A x - b t <= 0, 0 <= t <= 1, -1 <= x_i <= 1}`, which has a
    /// vertex with `t > 0` iff `self` is nonempty.
    pub fn is_empty(&self) -> bool {
        let m = self.dim;
        let mut rows: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .map(|h| {
                let mut c = h.coeffs.clone();
                c.push(-h.bound.clone());
                HalfSpace::new(c, Rational::zero())
            })
            .collect();
        rows.extend(box_rows(m + 1, 1));
        let mut lower = vec![Rational::zero(); m + 1];
        lower[m] = int(-1);
        rows.push(HalfSpace::new(lower, Rational::zero()));
        let mut upper = vec![Rational::zero(); m + 1];
        upper[m] = int(1);
        rows.push(HalfSpace::new(upper, int(1)));
        !basic_feasible_points(m + 1, &rows)
            .iter()
            .any(|v| v[m].is_positive())
    }
}

/// `-1 <= x_i <= 1` for the first `dim - skip` coordinates.
fn box_rows(dim: usize, skip: usize) -> Vec<HalfSpace> {
    let mut rows = Vec::new();
    for i in 0..dim - skip {
        for s in [1, -1] {
            let mut c = vec![Rational::zero(); dim];
            c[i] = int(s);
            rows.push(HalfSpace::new(c, int(1)));
        }
    }
    rows
}

/// Vertex description: sorted, duplicate-free points.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VRep {
    pub vertices: Vec<Vec<Rational>>,
}

impl VRep {
    pub fn from_points(points: impl IntoIterator<Item = Vec<Rational>>) -> Self {
        let set: BTreeSet<Vec<Rational>> = points.into_iter().collect();
        VRep {
            vertices: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(p)).is_ok()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let parts: Vec<String> = v.iter().map(format_rational).collect();
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Rank of a list of rational rows.
pub fn rational_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(sel) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, sel);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &pivot;
                for c in col..cols {
                    let v = &rows[rank][c] * &f;
                    rows[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Unique solution of the square system `a x = b`, if any.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let sel = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, sel);
        b.swap(col, sel);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some(b)
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Feasible solutions of every nonsingular `dim`-subset of `rows` taken with
/// equality, deduplicated and sorted.
fn basic_feasible_points(dim: usize, rows: &[HalfSpace]) -> Vec<Vec<Rational>> {
    if dim == 0 {
        let feasible = rows.iter().all(|h| !h.bound.is_negative());
        return if feasible { vec![Vec::new()] } else { Vec::new() };
    }
    let subsets = combinations(rows.len(), dim);
    let found: Vec<Vec<Rational>> = parallel::pool().install(|| {
        subsets
            .par_iter()
            .filter_map(|idx| {
                let a = idx.iter().map(|&i| rows[i].coeffs.clone()).collect();
                let b = idx.iter().map(|&i| rows[i].bound.clone()).collect();
                let x = solve_square(a, b)?;
                rows.iter().all(|h| h.satisfied_by(&x)).then_some(x)
            })
            .collect()
    });
    let set: BTreeSet<Vec<Rational>> = found.into_iter().collect();
    set.into_iter().collect()
}

pub fn enumerate_vertices(h: &HRep) -> Result<VRep, RegionError> {
    if !h.is_bounded() {
        if h.is_empty() {
            return Ok(VRep::default());
        }
        return Err(RegionError::Unbounded);
    }
    let points = basic_feasible_points(h.dim, &h.halfspaces);
    debug_assert!(points.iter().all(|p| h.is_vertex(p)));
    Ok(VRep { vertices: points })
}

pub fn contains(h: &HRep, point: &[Rational]) -> Result<bool, RegionError> {
    h.contains(point)
}

/// Largest `t` with `t·(1,…,1)` in the region.
pub fn uniform_capacity(h: &HRep) -> Result<Rational, RegionError> {
    let origin = vec![Rational::zero(); h.dim];
    if !h.contains(&origin)? {
        return Err(RegionError::OriginOutside);
    }
    h.halfspaces
        .iter()
        .filter_map(|hs| {
            let s: Rational = hs.coeffs.iter().sum();
            s.is_positive().then(|| &hs.bound / s)
        })
        .min()
        .ok_or(RegionError::NoDiagonalBound)
}

/// Largest coordinate mean over the region, attained at a vertex.
pub fn average_capacity(h: &HRep) -> Result<Rational, RegionError> {
    let v = enumerate_vertices(h)?;
    let m = int(h.dim as i64);
    v.vertices
        .iter()
        .map(|p| p.iter().sum::<Rational>() / &m)
        .max()
        .ok_or(RegionError::Empty)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionClass {
    Routing,
    Coding,
    LinearEven,
    LinearOdd,
    Linear,
    ShannonOuter,
    ZyOuter,
}

impl RegionClass {
    pub const ALL: [RegionClass; 7] = [
        RegionClass::Routing,
        RegionClass::Coding,
        RegionClass::LinearEven,
        RegionClass::LinearOdd,
        RegionClass::Linear,
        RegionClass::ShannonOuter,
        RegionClass::ZyOuter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionClass::Routing => "routing",
            RegionClass::Coding => "coding",
            RegionClass::LinearEven => "linear-even",
            RegionClass::LinearOdd => "linear-odd",
            RegionClass::Linear => "linear",
            RegionClass::ShannonOuter => "shannon-outer",
            RegionClass::ZyOuter => "zy-outer",
        }
    }
}

impl fmt::Display for RegionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionClass {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RegionClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| RegionError::UnknownClass(s.to_string()))
    }
}

/// A cataloged region with the vertex list it is known to have (empty when
/// no list is known).
#[derive(Debug, Clone)]
pub struct CatalogRegion {
    pub network: NetworkId,
    pub class: RegionClass,
    pub variables: Vec<String>,
    pub hrep: HRep,
    pub expected: VRep,
}

/// The (network, class) pairs with a cataloged region, in display order.
pub fn catalog_pairs() -> Vec<(NetworkId, RegionClass)> {
    use NetworkId::*;
    use RegionClass::*;
    vec![
        (GButterfly, Coding),
        (GButterfly, Routing),
        (Fano, Coding),
        (Fano, LinearOdd),
        (Fano, Routing),
        (NonFano, Coding),
        (NonFano, LinearEven),
        (NonFano, Routing),
        (Vamos, Routing),
        (Vamos, ShannonOuter),
        (Vamos, Linear),
        (Vamos, ZyOuter),
    ]
}

/// Maps class aliases to the cataloged class (e.g. linear coding on the
/// butterfly has the same region as general coding).
pub fn canonical_class(id: NetworkId, class: RegionClass) -> Option<RegionClass> {
    use NetworkId::*;
    use RegionClass::*;
    let c = match (id, class) {
        (GButterfly, Linear | LinearEven | LinearOdd) => Coding,
        (Fano, Linear | LinearEven) => Coding,
        (NonFano, Linear | LinearOdd) => Coding,
        (_, c) => c,
    };
    catalog_pairs().contains(&(id, c)).then_some(c)
}

fn le(coeffs: &[i64], num: i64, den: i64) -> HalfSpace {
    HalfSpace::from_ints(coeffs, rat(num, den))
}

fn nonneg(m: usize) -> Vec<HalfSpace> {
    (0..m)
        .map(|i| {
            let mut c = vec![0; m];
            c[i] = -1;
            le(&c, 0, 1)
        })
        .collect()
}

/// Points written as comma-separated rationals.
fn points(list: &[&str]) -> VRep {
    VRep::from_points(list.iter().map(|s| {
        s.split(',')
            .map(|t| parse_rational(t).expect("catalog point"))
            .collect()
    }))
}

fn region(m: usize, extra: Vec<HalfSpace>) -> HRep {
    let mut hs = nonneg(m);
    hs.extend(extra);
    HRep::new(m, hs).expect("catalog dimensions")
}

pub fn rate_variables(id: NetworkId) -> Vec<String> {
    let msgs: &[&str] = match id {
        NetworkId::GButterfly | NetworkId::Vamos => &["a", "b", "c", "d"],
        NetworkId::Fano | NetworkId::NonFano => &["a", "b", "c"],
    };
    msgs.iter().map(|m| format!("r_{m}")).collect()
}

fn butterfly_coding() -> Vec<HalfSpace> {
    vec![
        le(&[0, 1, 0, 0], 1, 1),
        le(&[0, 0, 1, 0], 1, 1),
        le(&[1, 1, 1, 0], 2, 1),
        le(&[0, 1, 1, 1], 2, 1),
        le(&[1, 1, 1, 1], 3, 1),
    ]
}

fn vamos_shannon() -> Vec<HalfSpace> {
    vec![
        le(&[1, 0, 0, 0], 1, 1),
        le(&[0, 0, 0, 1], 1, 1),
        le(&[0, 1, 1, 0], 2, 1),
        le(&[1, 1, 0, 0], 2, 1),
        le(&[0, 0, 1, 1], 2, 1),
    ]
}

pub fn builtin_region(id: NetworkId, class: RegionClass) -> Result<CatalogRegion, RegionError> {
    use NetworkId::*;
    use RegionClass::*;
    let canonical = canonical_class(id, class).ok_or(RegionError::Unsupported { network: id, class })?;
    let (hrep, expected) = match (id, canonical) {
        (GButterfly, Coding) => (
            region(4, butterfly_coding()),
            points(&[
                "0,0,0,0", "0,0,0,2", "2,0,0,0", "0,1,0,0", "0,0,1,0", "2,0,0,1", "1,0,0,2",
                "0,0,1,1", "1,1,0,0", "1,0,1,1", "1,1,0,1", "0,1,1,0", "0,1,0,1", "1,0,1,0",
            ]),
        ),
        (GButterfly, Routing) => {
            let mut hs = butterfly_coding();
            hs.push(le(&[0, 1, 1, 0], 1, 1));
            (
                region(4, hs),
                points(&[
                    "0,0,0,0", "0,0,0,2", "2,0,0,0", "0,1,0,0", "0,1,0,1", "0,0,1,0", "2,0,0,1",
                    "1,0,0,2", "0,0,1,1", "1,0,1,0", "1,1,0,0", "1,0,1,1", "1,1,0,1",
                ]),
            )
        }
        (Fano, Coding) => (
            region(
                3,
                vec![
                    le(&[1, 0, 0], 1, 1),
                    le(&[0, 0, 1], 1, 1),
                    le(&[0, 1, 1], 2, 1),
                    le(&[1, 1, 0], 2, 1),
                ],
            ),
            points(&[
                "0,0,0", "0,0,1", "1,0,0", "0,2,0", "0,1,1", "1,0,1", "1,1,0", "1,1,1",
            ]),
        ),
        (Fano, LinearOdd) => (
            region(
                3,
                vec![
                    le(&[1, 0, 0], 1, 1),
                    le(&[0, 0, 1], 1, 1),
                    le(&[1, 2, 2], 4, 1),
                    le(&[2, 1, 2], 4, 1),
                    le(&[2, 2, 1], 4, 1),
                ],
            ),
            points(&[
                "0,0,0", "0,0,1", "1,0,0", "0,2,0", "0,1,1", "1,0,1", "1,1,0", "2/3,2/3,1",
                "1,2/3,2/3", "4/5,4/5,4/5",
            ]),
        ),
        (Fano, Routing) => (
            region(
                3,
                vec![
                    le(&[1, 0, 0], 1, 1),
                    le(&[0, 0, 1], 1, 1),
                    le(&[1, 1, 1], 2, 1),
                ],
            ),
            points(&["0,0,0", "0,0,1", "1,0,0", "0,2,0", "0,1,1", "1,0,1", "1,1,0"]),
        ),
        (NonFano, Coding) => (
            region(
                3,
                vec![le(&[1, 0, 0], 1, 1), le(&[0, 1, 0], 1, 1), le(&[0, 0, 1], 1, 1)],
            ),
            points(&[
                "0,0,0", "0,0,1", "1,0,0", "0,1,0", "0,1,1", "1,0,1", "1,1,0", "1,1,1",
            ]),
        ),
        (NonFano, LinearEven) => (
            region(
                3,
                vec![
                    le(&[1, 0, 0], 1, 1),
                    le(&[0, 1, 0], 1, 1),
                    le(&[0, 0, 1], 1, 1),
                    le(&[1, 1, 1], 5, 2),
                ],
            ),
            points(&[
                "0,0,0", "0,0,1", "1,0,0", "0,1,0", "0,1,1", "1,0,1", "1,1,0", "1,1,1/2",
                "1,1/2,1", "1/2,1,1",
            ]),
        ),
        (NonFano, Routing) => (
            region(3, vec![le(&[1, 1, 1], 1, 1)]),
            points(&["0,0,0", "0,0,1", "1,0,0", "0,1,0"]),
        ),
        (Vamos, Routing) => (
            region(4, vec![le(&[2, 1, 0, 2], 2, 1), le(&[1, 1, 1, 2], 2, 1)]),
            points(&["0,0,0,0", "1,0,0,0", "0,0,0,1", "1,0,1,0", "0,2,0,0", "0,0,2,0"]),
        ),
        (Vamos, ShannonOuter) => (
            region(4, vamos_shannon()),
            points(&[
                "0,2,0,1", "0,2,0,0", "1,1,1,0", "1,1,0,0", "1,1,0,1", "1,0,0,1", "0,0,0,1",
                "0,0,0,0", "1,0,0,0", "1,0,1,1", "0,0,1,1", "0,1,1,1", "1,0,2,0", "0,0,2,0",
                "1,1,1,1",
            ]),
        ),
        (Vamos, Linear) => {
            let mut hs = vamos_shannon();
            hs.push(le(&[1, 2, 2, 1], 5, 1));
            (
                region(4, hs),
                points(&[
                    "0,0,2,0", "0,0,1,1", "1,0,1,1", "1,0,0,0", "0,0,0,0", "0,0,0,1", "1,0,0,1",
                    "1,1,0,1", "1,1,0,0", "0,2,0,0", "1,1,1/2,1", "1,1/2,1,1", "0,2,0,1",
                    "1,1,1,0", "0,1,1,1", "1,0,2,0",
                ]),
            )
        }
        (Vamos, ZyOuter) => {
            let mut hs = vamos_shannon();
            hs.extend([
                le(&[4, 4, 2, 1], 10, 1),
                le(&[2, 2, 4, 4], 11, 1),
                le(&[1, 2, 4, 5], 11, 1),
                le(&[5, 6, 6, 5], 20, 1),
            ]);
            (region(4, hs), VRep::default())
        }
        _ => return Err(RegionError::Unsupported { network: id, class }),
    };
    Ok(CatalogRegion {
        network: id,
        class: canonical,
        variables: rate_variables(id),
        hrep,
        expected,
    })
}

/// Coefficients `a1..a10` of a four-variable inequality
/// `a1 I(A;B) <= a2 I(A;B|C) + a3 I(A;C|B) + a4 I(B;C|A) + a5 I(A;B|D)
///  + a6 I(A;D|B) + a7 I(B;D|A) + a8 I(C;D) + a9 I(C;D|A) + a10 I(C;D|B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferCoefficients(pub [Rational; 10]);

impl TransferCoefficients {
    pub fn from_ints(a: [i64; 10]) -> Self {
        TransferCoefficients(a.map(int))
    }

    pub fn ingleton() -> Self {
        TransferCoefficients::from_ints([1, 1, 0, 0, 1, 0, 0, 1, 0, 0])
    }

    pub fn zhang_yeung() -> Self {
        TransferCoefficients::from_ints([1, 2, 1, 1, 1, 0, 0, 1, 0, 0])
    }

    /// Zhang-Yeung with the roles of C and D exchanged.
    pub fn zhang_yeung_swapped() -> Self {
        TransferCoefficients::from_ints([1, 1, 0, 0, 2, 1, 1, 1, 0, 0])
    }

    fn a(&self, i: usize) -> &Rational {
        &self.0[i - 1]
    }
}

/// A rate bound `coeffs · (k_a,k_b,k_c,k_d) <= n_coeff · n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateBound {
    pub coeffs: [Rational; 4],
    pub n_coeff: Rational,
}

impl RateBound {
    /// The same bound on rates `r_i = k_i / n`.
    pub fn halfspace(&self) -> HalfSpace {
        HalfSpace::new(self.coeffs.to_vec(), self.n_coeff.clone())
    }
}

/// Bound on message entropies H(a..d), the terms I(c;y), I(b;x), and edge
/// entropies H(w..z) of the Vámos network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VamosBound {
    pub lhs_messages: [Rational; 4],
    pub lhs_i_cy: Rational,
    pub lhs_i_bx: Rational,
    pub rhs_edges: [Rational; 4],
    pub reducible: bool,
    pub rate_bound: Option<RateBound>,
}

pub fn transfer_vamos(c: &TransferCoefficients) -> VamosBound {
    let a = |i| c.a(i).clone();
    let lhs_messages = [
        a(2) + a(3) + a(4),
        a(2) + a(3) + a(8) + a(9) + a(10),
        a(5) + a(7) + a(8) + a(9) + a(10),
        a(5) + a(6) + a(7),
    ];
    let lhs_i_cy = a(2) - a(1) - a(7);
    let lhs_i_bx = a(4) + a(7) - a(10);
    let rhs_edges = [
        a(5) + a(6) + a(7) + a(8) + a(9) + a(10),
        a(2) + a(3) + a(4) + a(7),
        -a(1) + a(2) + a(5) + a(9),
        a(3) + a(8) + a(10),
    ];
    let reducible = a(2) >= a(1) + a(7) && a(4) + a(7) >= a(10);
    let rate_bound = reducible.then(|| {
        let two = int(2);
        RateBound {
            coeffs: lhs_messages.clone(),
            n_coeff: -a(1)
                + &two * a(2)
                + &two * a(3)
                + a(4)
                + &two * a(5)
                + a(6)
                + &two * a(7)
                + &two * a(8)
                + &two * a(9)
                + &two * a(10),
        }
    });
    VamosBound {
        lhs_messages,
        lhs_i_cy,
        lhs_i_bx,
        rhs_edges,
        reducible,
        rate_bound,
    }
}

impl fmt::Display for VamosBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn terms(coeffs: &[(&Rational, &str)]) -> String {
            let mut s = String::new();
            for (c, name) in coeffs {
                if c.is_zero() {
                    continue;
                }
                let neg = c.is_negative();
                let mag = c.abs();
                if s.is_empty() {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                if !mag.is_one() {
                    s.push_str(&format_rational(&mag));
                }
                s.push_str(name);
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        }
        let m = &self.lhs_messages;
        let e = &self.rhs_edges;
        let lhs = terms(&[
            (&m[0], "H(a)"),
            (&m[1], "H(b)"),
            (&m[2], "H(c)"),
            (&m[3], "H(d)"),
            (&self.lhs_i_cy, "I(c;y)"),
            (&self.lhs_i_bx, "I(b;x)"),
        ]);
        let rhs = terms(&[(&e[0], "H(w)"), (&e[1], "H(x)"), (&e[2], "H(y)"), (&e[3], "H(z)")]);
        write!(f, "{lhs} <= {rhs}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Vec<Rational> {
        s.split(',').map(|t| parse_rational(t).unwrap()).collect()
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("5/2"), Some(rat(5, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-2, 3)), "-2/3");
    }

    #[test]
    fn interval() {
        let h = HRep::parse("-1 <= 0\n1 <= 1\n").unwrap();
        let v = enumerate_vertices(&h).unwrap();
        assert_eq!(v.vertices, vec![p("0"), p("1")]);
    }

    #[test]
    fn cube_vertices() {
        let r = builtin_region(NetworkId::NonFano, RegionClass::Coding).unwrap();
        let v = enumerate_vertices(&r.hrep).unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v, r.expected);
    }

    #[test]
    fn unbounded_and_empty() {
        let h = HRep::parse("-1 0 <= 0\n0 -1 <= 0\n").unwrap();
        assert_eq!(enumerate_vertices(&h), Err(RegionError::Unbounded));
        // x >= 1 and x <= 0 with y free: empty but recession cone nontrivial
        let h = HRep::parse("-1 0 <= -1\n1 0 <= 0\n").unwrap();
        assert!(h.is_empty());
        assert_eq!(enumerate_vertices(&h).unwrap(), VRep::default());
        let h = HRep::parse("1 <= 0\n-1 <= -1\n").unwrap();
        assert_eq!(enumerate_vertices(&h).unwrap(), VRep::default());
        assert_eq!(average_capacity(&h), Err(RegionError::Empty));
    }

    #[test]
    fn redundant_and_tautological_rows() {
        let h = HRep::parse("-1 0 <= 0\n0 -1 <= 0\n1 1 <= 1\n2 2 <= 5\n0 0 <= 3\n").unwrap();
        assert!(h.halfspaces()[4].is_tautology());
        let v = enumerate_vertices(&h).unwrap();
        assert_eq!(v.vertices, vec![p("0,0"), p("0,1"), p("1,0")]);
    }

    #[test]
    fn membership_examples() {
        let r = builtin_region(NetworkId::GButterfly, RegionClass::Coding).unwrap();
        let t = rat(2, 3);
        assert!(contains(&r.hrep, &vec![t; 4]).unwrap());
        assert!(!contains(&r.hrep, &p("1,1,1,1")).unwrap());
        assert!(contains(&r.hrep, &p("0,0,0,0")).unwrap());
        assert!(matches!(
            contains(&r.hrep, &p("0,0")),
            Err(RegionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn capacities() {
        let cap = |id, c| {
            let r = builtin_region(id, c).unwrap();
            (uniform_capacity(&r.hrep).unwrap(), average_capacity(&r.hrep).unwrap())
        };
        use NetworkId::*;
        use RegionClass::*;
        assert_eq!(cap(GButterfly, Coding), (rat(2, 3), rat(3, 4)));
        assert_eq!(cap(GButterfly, Routing), (rat(1, 2), rat(3, 4)));
        assert_eq!(cap(Fano, Coding).0, int(1));
        assert_eq!(cap(Fano, LinearOdd).0, rat(4, 5));
        assert_eq!(cap(NonFano, Coding).0, int(1));
        assert_eq!(cap(NonFano, LinearEven), (rat(5, 6), rat(5, 6)));
        assert_eq!(cap(Vamos, Linear).0, rat(5, 6));
        assert_eq!(cap(Vamos, Routing).1, rat(1, 2));
    }

    #[test]
    fn capacity_errors() {
        let h = HRep::parse("-1 0 <= -1\n1 1 <= 3\n").unwrap();
        assert_eq!(uniform_capacity(&h), Err(RegionError::OriginOutside));
        let h = HRep::parse("-1 -1 <= 0\n").unwrap();
        assert_eq!(uniform_capacity(&h), Err(RegionError::NoDiagonalBound));
    }

    #[test]
    fn aliases_and_unsupported_pairs() {
        use NetworkId::*;
        use RegionClass::*;
        assert_eq!(builtin_region(Fano, LinearEven).unwrap().class, Coding);
        assert_eq!(builtin_region(NonFano, LinearOdd).unwrap().class, Coding);
        assert_eq!(builtin_region(GButterfly, Linear).unwrap().class, Coding);
        assert!(matches!(
            builtin_region(Fano, ShannonOuter),
            Err(RegionError::Unsupported { .. })
        ));
        assert!(builtin_region(Vamos, Coding).is_err());
        assert_eq!("zy-outer".parse::<RegionClass>().unwrap(), ZyOuter);
        assert!("nonsense".parse::<RegionClass>().is_err());
    }

    #[test]
    fn hrep_text_round_trip() {
        for (id, c) in catalog_pairs() {
            let r = builtin_region(id, c).unwrap();
            assert_eq!(HRep::parse(&r.hrep.to_text()).unwrap(), r.hrep);
        }
        assert!(matches!(HRep::parse("1 2 <= 3\n1 <= 2\n"), Err(RegionError::Parse { line: 2, .. })));
        assert!(HRep::parse("1 2 3\n").is_err());
        assert!(HRep::parse("# nothing\n").is_err());
    }

    #[test]
    fn render_plane() {
        let h = HalfSpace::from_ints(&[1, 2, 2, 1], int(5));
        let names = rate_variables(NetworkId::Vamos);
        assert_eq!(h.render(&names), "r_a + 2r_b + 2r_c + r_d <= 5");
        let h = HalfSpace::from_ints(&[-1, 0, 0, 0], int(0));
        assert_eq!(h.render(&names), "-r_a <= 0");
    }

    #[test]
    fn transfer_examples() {
        let b = transfer_vamos(&TransferCoefficients::ingleton());
        assert_eq!(b.lhs_messages, [int(1), int(2), int(2), int(1)]);
        assert_eq!(b.rhs_edges, [int(2), int(1), int(1), int(1)]);
        assert_eq!(b.to_string(), "H(a) + 2H(b) + 2H(c) + H(d) <= 2H(w) + H(x) + H(y) + H(z)");
        let rb = b.rate_bound.unwrap();
        assert_eq!(rb.n_coeff, int(5));

        let b = transfer_vamos(&TransferCoefficients::zhang_yeung());
        assert_eq!(b.lhs_messages, [int(4), int(4), int(2), int(1)]);
        assert_eq!(b.lhs_i_cy, int(1));
        assert!(b.reducible);
        assert_eq!(b.rate_bound.unwrap().n_coeff, int(10));

        let b = transfer_vamos(&TransferCoefficients::zhang_yeung_swapped());
        assert_eq!(b.lhs_messages, [int(1), int(2), int(4), int(4)]);
        assert_eq!(b.rhs_edges, [int(5), int(2), int(2), int(1)]);
        assert_eq!(b.lhs_i_cy, int(-1));
        assert!(!b.reducible);
        assert!(b.rate_bound.is_none());

        let b = transfer_vamos(&TransferCoefficients::from_ints([0; 10]));
        assert!(b.reducible);
        assert_eq!(b.rate_bound.unwrap().n_coeff, int(0));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(13, 4).len(), 715);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
