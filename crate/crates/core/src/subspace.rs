//! Subspaces of GF(q)^d in canonical (RREF) form, the lattice operations on
//! them, and dimension-valued "entropies" of variable assignments.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::ff::{FieldError, Matrix, PrimeField};

/// Upper bound on `q^d` for subspace enumeration.
pub const ENUMERATION_GUARD: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("ambient spaces differ: {0} vs {1}")]
    AmbientMismatch(String, String),
    #[error("vector of length {got} does not live in dimension {expected}")]
    BadVector { expected: usize, got: usize },
    #[error("enumerating subspaces of GF({q})^{d} exceeds the guard of {ENUMERATION_GUARD} vectors")]
    GuardExceeded { q: u32, d: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A subspace stored by the RREF of a basis; equal subspaces compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 0 {
            return f.write_str("{0}");
        }
        let rows: Vec<String> = self
            .basis
            .to_rows()
            .iter()
            .map(|r| {
                let v: Vec<String> = r.iter().map(u32::to_string).collect();
                format!("({})", v.join(","))
            })
            .collect();
        write!(f, "<{}>", rows.join(" "))
    }
}

impl Subspace {
    pub fn zero(field: PrimeField, d: usize) -> Self {
        Subspace {
            ambient: d,
            basis: Matrix::zeros(field, 0, d),
        }
    }

    pub fn whole(field: PrimeField, d: usize) -> Self {
        Subspace {
            ambient: d,
            basis: Matrix::identity(field, d),
        }
    }

    /// Row space of `m`.
    pub fn from_matrix(m: &Matrix) -> Self {
        Subspace {
            ambient: m.cols(),
            basis: m.rref(),
        }
    }

    pub fn span(field: PrimeField, d: usize, gens: &[Vec<i64>]) -> Result<Self, SubspaceError> {
        for g in gens {
            if g.len() != d {
                return Err(SubspaceError::BadVector {
                    expected: d,
                    got: g.len(),
                });
            }
        }
        Ok(Subspace::from_matrix(&Matrix::from_rows(field, d, gens)?))
    }

    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    fn ambient_label(&self) -> String {
        format!("GF({})^{}", self.field().modulus(), self.ambient)
    }

    fn check(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.field() != other.field() || self.ambient != other.ambient {
            return Err(SubspaceError::AmbientMismatch(
                self.ambient_label(),
                other.ambient_label(),
            ));
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        let row = Matrix::from_rows(
            self.field(),
            self.ambient,
            &[v.iter().map(|&x| x as i64).collect::<Vec<_>>()],
        );
        match row {
            Ok(r) => self.basis.rowspace_contains(&r).unwrap_or(false),
            Err(_) => false,
        }
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.check(other).is_ok() && other.basis.rowspace_contains(&self.basis).unwrap_or(false)
    }

    /// Rows spanning `{v : <u, v> = 0 for all u in self}`.
    pub fn annihilator(&self) -> Matrix {
        self.basis.nullspace()
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check(other)?;
        Ok(Subspace::from_matrix(&self.basis.stack(&other.basis)?))
    }

    pub fn meet(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check(other)?;
        let constraints = self.annihilator().stack(&other.annihilator())?;
        Ok(Subspace::from_matrix(&constraints.nullspace()))
    }

    /// Image of every basis vector under `g` (a `d x d` matrix acting on
    /// column vectors).
    pub fn transform(&self, g: &Matrix) -> Result<Subspace, SubspaceError> {
        Ok(Subspace::from_matrix(&self.basis.mul(&g.transpose())?))
    }
}

pub fn subspace_span(q: u32, d: usize, gens: &[Vec<i64>]) -> Result<Subspace, SubspaceError> {
    Subspace::span(PrimeField::new(q)?, d, gens)
}

pub fn join(a: &Subspace, b: &Subspace) -> Result<Subspace, SubspaceError> {
    a.join(b)
}

pub fn meet(a: &Subspace, b: &Subspace) -> Result<Subspace, SubspaceError> {
    a.meet(b)
}

/// A linear map GF(q)^domain → GF(q)^codomain given by a
/// `codomain x domain` matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub matrix: Matrix,
}

impl LinearMap {
    pub fn new(matrix: Matrix) -> Self {
        LinearMap { matrix }
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn preimage(&self, target: &Subspace) -> Result<Subspace, SubspaceError> {
        if target.field() != self.matrix.field() || target.ambient_dim() != self.codomain_dim() {
            return Err(SubspaceError::AmbientMismatch(
                format!("GF({})^{}", self.matrix.field().modulus(), self.codomain_dim()),
                target.ambient_label(),
            ));
        }
        let constraints = target.annihilator().mul(&self.matrix)?;
        Ok(Subspace::from_matrix(&constraints.nullspace()))
    }
}

pub fn preimage(f: &LinearMap, target: &Subspace) -> Result<Subspace, SubspaceError> {
    f.preimage(target)
}

fn check_guard(q: u32, d: usize) -> Result<(), SubspaceError> {
    let mut size: u64 = 1;
    for _ in 0..d {
        size = size.saturating_mul(q as u64);
        if size > ENUMERATION_GUARD {
            return Err(SubspaceError::GuardExceeded { q, d });
        }
    }
    Ok(())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every subspace of GF(q)^d, ordered by dimension, then pivot columns,
/// then free entries (all lexicographic).
pub fn enumerate_subspaces(q: u32, d: usize) -> Result<Vec<Subspace>, SubspaceError> {
    let field = PrimeField::new(q)?;
    check_guard(q, d)?;
    let mut out = Vec::new();
    for k in 0..=d {
        for pivots in combinations(d, k) {
            // free slots: (row, col) right of the row's pivot and not a pivot column
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &p)| {
                    let pivots = &pivots;
                    (p + 1..d)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let mut digits = vec![0u32; free.len()];
            loop {
                let mut m = Matrix::zeros(field, k, d);
                for (r, &p) in pivots.iter().enumerate() {
                    m.set(r, p, 1);
                }
                for (&(r, c), &v) in free.iter().zip(&digits) {
                    m.set(r, c, v);
                }
                out.push(Subspace { ambient: d, basis: m });
                // odometer, last slot fastest
                let mut done = true;
                for i in (0..free.len()).rev() {
                    digits[i] += 1;
                    if digits[i] < q {
                        done = false;
                        break;
                    }
                    digits[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// All subspaces of one ambient space with a precomputed join table, so the
/// dimension of a join of several subspaces is a chain of table lookups.
#[derive(Debug, Clone)]
pub struct SubspaceTable {
    field: PrimeField,
    d: usize,
    subspaces: Vec<Subspace>,
    dims: Vec<u8>,
    join: Vec<u32>,
    index: HashMap<Subspace, u32>,
}

impl SubspaceTable {
    pub fn new(q: u32, d: usize) -> Result<Self, SubspaceError> {
        let field = PrimeField::new(q)?;
        let subspaces = enumerate_subspaces(q, d)?;
        let n = subspaces.len();
        let index: HashMap<Subspace, u32> = subspaces
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut join = vec![0u32; n * n];
        for i in 0..n {
            for j in i..n {
                let s = subspaces[i].join(&subspaces[j])?;
                let k = index[&s];
                join[i * n + j] = k;
                join[j * n + i] = k;
            }
        }
        let dims = subspaces.iter().map(|s| s.dim() as u8).collect();
        Ok(SubspaceTable {
            field,
            d,
            subspaces,
            dims,
            join,
            index,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.subspaces[i]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).map(|&i| i as usize)
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    /// Index of the zero subspace (always first).
    pub fn zero_index(&self) -> usize {
        0
    }

    #[inline]
    pub fn join_index(&self, i: usize, j: usize) -> usize {
        self.join[i * self.subspaces.len() + j] as usize
    }

    #[inline]
    pub fn dim_of(&self, i: usize) -> usize {
        self.dims[i] as usize
    }

    /// Dimension of the join of the subspaces with the given indices.
    pub fn joint_dim(&self, idx: impl IntoIterator<Item = usize>) -> usize {
        let acc = idx
            .into_iter()
            .fold(self.zero_index(), |acc, i| self.join_index(acc, i));
        self.dim_of(acc)
    }
}

/// Named subspaces sharing one ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceAssignment {
    field: PrimeField,
    d: usize,
    vars: BTreeMap<String, Subspace>,
}

impl SubspaceAssignment {
    pub fn new(field: PrimeField, d: usize) -> Self {
        SubspaceAssignment {
            field,
            d,
            vars: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn insert(&mut self, name: &str, s: Subspace) -> Result<(), SubspaceError> {
        if s.field() != self.field || s.ambient_dim() != self.d {
            return Err(SubspaceError::AmbientMismatch(
                format!("GF({})^{}", self.field.modulus(), self.d),
                s.ambient_label(),
            ));
        }
        self.vars.insert(name.to_string(), s);
        Ok(())
    }

    pub fn with(mut self, name: &str, gens: &[Vec<i64>]) -> Result<Self, SubspaceError> {
        let s = Subspace::span(self.field, self.d, gens)?;
        self.insert(name, s)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&Subspace> {
        self.vars.get(name)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.vars.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Subspace)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Dimension of the join of the named subspaces; the empty set gives 0.
    pub fn entropy<S: AsRef<str>>(&self, names: &[S]) -> Result<usize, SubspaceError> {
        Ok(self.joint(names)?.dim())
    }

    /// The join of the named subspaces.
    pub fn joint<S: AsRef<str>>(&self, names: &[S]) -> Result<Subspace, SubspaceError> {
        let mut acc = Subspace::zero(self.field, self.d);
        for n in names {
            let s = self
                .vars
                .get(n.as_ref())
                .ok_or_else(|| SubspaceError::UnknownVariable(n.as_ref().to_string()))?;
            acc = acc.join(s)?;
        }
        Ok(acc)
    }

    /// Applies the same ambient transform to every subspace.
    pub fn transform(&self, g: &Matrix) -> Result<Self, SubspaceError> {
        let mut out = SubspaceAssignment::new(self.field, self.d);
        for (k, v) in &self.vars {
            out.insert(k, v.transform(g)?)?;
        }
        Ok(out)
    }

    /// Parses `ambient GF(q)^d` followed by `VAR = span (1,0,0) (0,1,0)` lines.
    pub fn parse(text: &str) -> Result<Self, SubspaceError> {
        let mut out: Option<SubspaceAssignment> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| SubspaceError::Parse { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix("ambient") {
                let rest = rest.trim();
                let inner = rest
                    .strip_prefix("GF(")
                    .and_then(|r| r.split_once(")^"))
                    .ok_or_else(|| err(format!("expected `ambient GF(q)^d`, got `{line}`")))?;
                let q: u32 = inner.0.trim().parse().map_err(|_| err("bad modulus".into()))?;
                let d: usize = inner.1.trim().parse().map_err(|_| err("bad dimension".into()))?;
                let field = PrimeField::new(q).map_err(|e| err(e.to_string()))?;
                out = Some(SubspaceAssignment::new(field, d));
                continue;
            }
            let asg = out
                .as_mut()
                .ok_or_else(|| err("the `ambient` header must come first".into()))?;
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `VAR = span ...`, got `{line}`")))?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(err(format!("bad variable name `{name}`")));
            }
            let rhs = rhs.trim();
            let body = rhs
                .strip_prefix("span")
                .ok_or_else(|| err("expected `span`".into()))?
                .trim();
            let mut gens = Vec::new();
            let mut rest = body;
            while !rest.is_empty() {
                let r = rest
                    .strip_prefix('(')
                    .ok_or_else(|| err(format!("expected `(` in `{rest}`")))?;
                let (inside, after) = r
                    .split_once(')')
                    .ok_or_else(|| err("unclosed `(`".into()))?;
                let v: Result<Vec<i64>, _> = inside
                    .split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect();
                gens.push(v.map_err(|_| err(format!("bad coordinates `{inside}`")))?);
                rest = after.trim_start();
            }
            let s = Subspace::span(asg.field, asg.d, &gens).map_err(|e| err(e.to_string()))?;
            asg.insert(name, s)?;
        }
        out.ok_or(SubspaceError::Parse {
            line: 0,
            msg: "missing `ambient GF(q)^d` header".into(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("ambient GF({})^{}\n", self.field.modulus(), self.d);
        for (k, v) in &self.vars {
            let gens: Vec<String> = v
                .basis()
                .to_rows()
                .iter()
                .map(|r| {
                    let c: Vec<String> = r.iter().map(u32::to_string).collect();
                    format!("({})", c.join(","))
                })
                .collect();
            if gens.is_empty() {
                s.push_str(&format!("{k} = span\n"));
            } else {
                s.push_str(&format!("{k} = span {}\n", gens.join(" ")));
            }
        }
        s
    }
}

/// Dimension of the join of the named subspaces.
pub fn entropy(assign: &SubspaceAssignment, vars: &BTreeSet<String>) -> Result<usize, SubspaceError> {
    let names: Vec<&String> = vars.iter().collect();
    assign.entropy(&names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn sp(q: u32, gens: &[&[i64]]) -> Subspace {
        let d = gens.first().map_or(3, |g| g.len());
        let gens: Vec<Vec<i64>> = gens.iter().map(|g| g.to_vec()).collect();
        subspace_span(q, d, &gens).unwrap()
    }

    /// Gaussian binomial [d choose k]_q by the product formula.
    fn gaussian_binomial(q: u64, d: u32, k: u32) -> u64 {
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..k {
            num *= q.pow(d - i) - 1;
            den *= q.pow(i + 1) - 1;
        }
        num / den
    }

    #[test]
    fn span_examples() {
        assert_eq!(sp(2, &[&[1, 0, 0]]).dim(), 1);
        assert_eq!(subspace_span(2, 3, &[]).unwrap().dim(), 0);
        assert_eq!(sp(2, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).dim(), 2);
    }

    #[test]
    fn join_examples() {
        let j = sp(2, &[&[1, 0, 0]]).join(&sp(2, &[&[0, 1, 0]])).unwrap();
        assert_eq!(j, sp(2, &[&[1, 0, 0], &[0, 1, 0]]));
        let w = sp(2, &[&[1, 1, 0]]);
        let x = sp(2, &[&[1, 0, 1]]);
        let wx = w.join(&x).unwrap();
        assert_eq!(wx.dim(), 2);
        assert!(wx.contains_vector(&[0, 1, 1]));
        assert_eq!(w.join(&w).unwrap(), w);
    }

    #[test]
    fn meet_examples() {
        let m = sp(2, &[&[1, 0, 0]]).meet(&sp(2, &[&[0, 1, 0]])).unwrap();
        assert_eq!(m.dim(), 0);
        let a = sp(2, &[&[1, 1, 0], &[1, 0, 1]]);
        let b = sp(2, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(a.meet(&b).unwrap(), sp(2, &[&[1, 1, 0]]));
        assert_eq!(a.meet(&a).unwrap(), a);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = sp(2, &[&[1, 0, 0]]);
        let b = sp(3, &[&[1, 0, 0]]);
        assert!(matches!(a.join(&b), Err(SubspaceError::AmbientMismatch(..))));
        let c = sp(2, &[&[1, 0]]);
        assert!(a.meet(&c).is_err());
    }

    #[test]
    fn preimage_examples() {
        let f = gf(2);
        let target = sp(2, &[&[1, 1, 0]]);
        let id = LinearMap::new(Matrix::identity(f, 3));
        assert_eq!(id.preimage(&target).unwrap(), target);

        let sum = LinearMap::new(Matrix::from_literal(f, &[&[1, 1]]));
        let zero = Subspace::zero(f, 1);
        assert_eq!(sum.preimage(&zero).unwrap(), sp(2, &[&[1, 1]]));

        let z = LinearMap::new(Matrix::zeros(f, 2, 3));
        assert_eq!(z.preimage(&Subspace::zero(f, 2)).unwrap(), Subspace::whole(f, 3));
    }

    #[test]
    fn enumeration_counts() {
        for (q, d, expected) in [(2, 2, 5), (2, 3, 16), (3, 3, 28), (3, 2, 6)] {
            let all = enumerate_subspaces(q, d).unwrap();
            assert_eq!(all.len(), expected, "GF({q})^{d}");
            let oracle: u64 = (0..=d as u32).map(|k| gaussian_binomial(q as u64, d as u32, k)).sum();
            assert_eq!(all.len() as u64, oracle);
            let distinct: BTreeSet<String> = all.iter().map(|s| s.to_string()).collect();
            assert_eq!(distinct.len(), all.len());
            for s in &all {
                assert_eq!(s.basis().rref(), *s.basis(), "stored bases are canonical");
            }
        }
        assert_eq!(enumerate_subspaces(5, 0).unwrap().len(), 1);
        assert!(matches!(
            enumerate_subspaces(2, 21),
            Err(SubspaceError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn counts_match_vector_level_enumeration() {
        // independent oracle: collect the span of every set of up to d vectors
        let f = gf(2);
        let d = 3;
        let vectors: Vec<Vec<i64>> = (0..8)
            .map(|m| (0..d).map(|b| ((m >> b) & 1) as i64).collect())
            .collect();
        let mut seen = BTreeSet::new();
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let s = Subspace::span(f, d, &[vectors[i].clone(), vectors[j].clone(), vectors[k].clone()])
                        .unwrap();
                    seen.insert(s.to_string());
                }
            }
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn modularity_over_gf2_cubed() {
        let all = enumerate_subspaces(2, 3).unwrap();
        for a in &all {
            for b in &all {
                let j = a.join(b).unwrap();
                let m = a.meet(b).unwrap();
                assert_eq!(a.dim() + b.dim(), j.dim() + m.dim());
                assert!(m.is_subspace_of(a) && m.is_subspace_of(b));
                assert!(a.is_subspace_of(&j) && b.is_subspace_of(&j));
            }
        }
    }

    #[test]
    fn lattice_laws() {
        let all = enumerate_subspaces(3, 2).unwrap();
        for a in &all {
            assert_eq!(a.join(a).unwrap(), *a);
            assert_eq!(a.meet(a).unwrap(), *a);
            for b in &all {
                assert_eq!(a.join(b).unwrap(), b.join(a).unwrap());
                assert_eq!(a.meet(b).unwrap(), b.meet(a).unwrap());
                for c in &all {
                    assert_eq!(
                        a.join(b).unwrap().join(c).unwrap(),
                        a.join(&b.join(c).unwrap()).unwrap()
                    );
                    assert_eq!(
                        a.meet(b).unwrap().meet(c).unwrap(),
                        a.meet(&b.meet(c).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn meet_agrees_with_vector_enumeration() {
        let f = gf(3);
        let all = enumerate_subspaces(3, 2).unwrap();
        let vecs: Vec<[u32; 2]> = (0..3).flat_map(|x| (0..3).map(move |y| [x, y])).collect();
        for a in &all {
            for b in &all {
                let common: Vec<Vec<i64>> = vecs
                    .iter()
                    .filter(|v| a.contains_vector(&v[..]) && b.contains_vector(&v[..]))
                    .map(|v| v.iter().map(|&x| x as i64).collect())
                    .collect();
                assert_eq!(a.meet(b).unwrap(), Subspace::span(f, 2, &common).unwrap());
            }
        }
    }

    #[test]
    fn join_table_matches_direct_joins() {
        let t = SubspaceTable::new(2, 3).unwrap();
        assert_eq!(t.len(), 16);
        for i in 0..t.len() {
            for j in 0..t.len() {
                let direct = t.get(i).join(t.get(j)).unwrap();
                assert_eq!(t.get(t.join_index(i, j)), &direct);
            }
        }
        assert_eq!(t.get(t.zero_index()).dim(), 0);
    }

    #[test]
    fn entropy_examples() {
        let asg = SubspaceAssignment::new(gf(2), 3)
            .with("A", &[vec![1, 0, 0]])
            .unwrap()
            .with("B", &[vec![0, 1, 0]])
            .unwrap()
            .with("C", &[vec![0, 0, 1]])
            .unwrap()
            .with("W", &[vec![1, 1, 0]])
            .unwrap()
            .with("X", &[vec![1, 0, 1]])
            .unwrap()
            .with("Y", &[vec![0, 1, 1]])
            .unwrap();
        assert_eq!(asg.entropy(&["A", "B", "C"]).unwrap(), 3);
        assert_eq!(asg.entropy(&["W", "X", "Y"]).unwrap(), 2);
        assert_eq!(asg.entropy::<&str>(&[]).unwrap(), 0);
        assert!(matches!(
            asg.entropy(&["Q"]),
            Err(SubspaceError::UnknownVariable(_))
        ));
        let set: BTreeSet<String> = ["A", "W"].iter().map(|s| s.to_string()).collect();
        assert_eq!(entropy(&asg, &set).unwrap(), 2);
    }

    #[test]
    fn assignment_text_round_trip() {
        let text = "# fano\nambient GF(2)^3\nA = span (1,0,0)\nW = span (1,1,0) (0,0,0)\nZ = span\n";
        let asg = SubspaceAssignment::parse(text).unwrap();
        assert_eq!(asg.get("W").unwrap().dim(), 1);
        assert_eq!(asg.get("Z").unwrap().dim(), 0);
        let again = SubspaceAssignment::parse(&asg.to_text()).unwrap();
        assert_eq!(again, asg);
        assert!(SubspaceAssignment::parse("A = span (1,0)\n").is_err());
        assert!(SubspaceAssignment::parse("ambient GF(4)^2\n").is_err());
        assert!(SubspaceAssignment::parse("ambient GF(2)^2\nA = span (1,0,1)\n").is_err());
    }

    fn random_subspace(rng: &mut ChaCha8Rng, f: PrimeField, d: usize) -> Subspace {
        let k = rng.gen_range(0..=d + 1);
        let gens: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..d).map(|_| rng.gen_range(0..f.modulus()) as i64).collect())
            .collect();
        Subspace::span(f, d, &gens).unwrap()
    }

    #[test]
    fn intersection_codimension_is_subadditive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (q, d) in [(2u32, 4usize), (3, 3)] {
            let f = gf(q);
            for _ in 0..500 {
                let parts: Vec<Subspace> = (0..3).map(|_| random_subspace(&mut rng, f, d)).collect();
                let meet = parts.iter().skip(1).fold(parts[0].clone(), |acc, s| acc.meet(s).unwrap());
                let sum: usize = parts.iter().map(Subspace::codim).sum();
                assert!(meet.codim() <= sum);
            }
        }
    }

    #[test]
    fn preimage_codimension_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = gf(3);
        for _ in 0..500 {
            let (m, n) = (rng.gen_range(0..5), rng.gen_range(0..5));
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen_range(0..3)).collect())
                .collect();
            let map = LinearMap::new(Matrix::from_rows(f, m, &rows).unwrap());
            let target = random_subspace(&mut rng, f, n);
            let pre = map.preimage(&target).unwrap();
            assert!(pre.codim() <= target.codim());
            // every basis vector of the preimage maps into the target
            for r in pre.basis().to_rows() {
                assert!(target.contains_vector(&map.matrix.apply(&r)));
            }
        }
    }
}
