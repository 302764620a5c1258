//! Fractional (k_1,…,k_m,n) codes on a network: linear codes given by edge
//! matrices and table codes given by lookup tables, their evaluation, and
//! verification that every receiver can compute its demands.

pub mod catalog;
mod exhaustive;
pub mod file;
mod formula;

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ff::{FieldError, Matrix, PrimeField};
use crate::netmodel::{LocalInput, Network, NetworkError, NetworkId};
use crate::rateregion::{format_rational, Rational};

pub use catalog::{achieve, builtin_code, builtin_codes, AchieveReport, CatalogCode, FieldClaim};
pub use exhaustive::{verify_solution_exhaustive, verify_solution_exhaustive_with_guard, DEFAULT_GUARD};
pub use formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("code is for network {code} but was checked against {net}")]
    NetworkMismatch { code: String, net: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown message `{0}`")]
    UnknownMessage(String),
    #[error("unknown demand {0}:{1}")]
    UnknownDemand(String, String),
    #[error("missing function for edge `{0}`")]
    MissingEdge(String),
    #[error("{what} has shape {got_rows}x{got_cols}, expected {rows}x{cols}")]
    BadShape {
        what: String,
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("edge dimension n must be at least 1")]
    ZeroEdgeDim,
    #[error("{0}")]
    Formula(String),
    #[error("edge `{edge}` is not a function of its inputs over GF({modulus})")]
    NotLocal { edge: String, modulus: u32 },
    #[error("receiver {receiver} cannot decode {message} over GF({modulus})")]
    NotDecodable {
        receiver: String,
        message: String,
        modulus: u32,
    },
    #[error("{size} assignments exceed the enumeration guard of {guard}")]
    GuardExceeded { size: u128, guard: u64 },
    #[error("table for {function} has no entry for input {key}")]
    MissingTableEntry { function: String, key: String },
    #[error("cannot combine codes: {0}")]
    Incompatible(String),
    #[error("assignment: {0}")]
    BadAssignment(String),
    #[error("code file: {0}")]
    File(String),
}

/// Message dimensions `k_i` and the common edge dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateSpec {
    pub message_dims: BTreeMap<String, usize>,
    pub n: usize,
}

impl RateSpec {
    /// Dimensions listed in the network's message order.
    pub fn new(net: &Network, dims: &[usize], n: usize) -> Result<Self, CodeError> {
        if dims.len() != net.messages.len() {
            return Err(CodeError::BadAssignment(format!(
                "{} message dimensions given for {} messages",
                dims.len(),
                net.messages.len()
            )));
        }
        if n == 0 {
            return Err(CodeError::ZeroEdgeDim);
        }
        Ok(RateSpec {
            message_dims: net.messages.iter().cloned().zip(dims.iter().copied()).collect(),
            n,
        })
    }

    pub fn k(&self, message: &str) -> usize {
        self.message_dims.get(message).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.message_dims.values().sum()
    }

    /// `(message, offset, k)` in the network's message order.
    pub fn layout(&self, net: &Network) -> Vec<(String, usize, usize)> {
        let mut off = 0;
        net.messages
            .iter()
            .map(|m| {
                let k = self.k(m);
                let e = (m.clone(), off, k);
                off += k;
                e
            })
            .collect()
    }

    /// Symbols seen by functions at `node`.
    pub fn local_width(&self, net: &Network, node: &str) -> usize {
        net.local_inputs(node)
            .iter()
            .map(|i| match i {
                LocalInput::Message(m) => self.k(m),
                LocalInput::Edge(_) => self.n,
            })
            .sum()
    }

    pub fn rate_vector(&self) -> RateVector {
        let n = BigInt::from(self.n);
        RateVector {
            entries: self
                .message_dims
                .iter()
                .map(|(m, &k)| (m.clone(), Rational::new(BigInt::from(k), n.clone())))
                .collect(),
        }
    }
}

/// Exact rates `k_i / n`, ordered by message id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateVector {
    pub entries: Vec<(String, Rational)>,
}

impl RateVector {
    pub fn point(&self) -> Vec<Rational> {
        self.entries.iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn is_origin(&self) -> bool {
        self.entries.iter().all(|(_, r)| r.is_zero())
    }
}

impl fmt::Display for RateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(_, r)| format_rational(r)).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for RateVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (m, r) in &self.entries {
            map.serialize_entry(m, &format_rational(r))?;
        }
        map.end()
    }
}

pub fn rate_vector<C: Code + ?Sized>(code: &C) -> RateVector {
    code.rates().rate_vector()
}

/// A linear fractional code. Each edge matrix maps the tail's local input
/// (local messages in message order, then in-edges in edge order) to `n`
/// output symbols; decoders map a receiver's local input to the `k` symbols
/// of the demanded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    pub network: NetworkId,
    pub field: PrimeField,
    pub rates: RateSpec,
    pub edges: BTreeMap<String, Matrix>,
    pub decoders: BTreeMap<(String, String), Matrix>,
}

/// A lookup table over `alphabet^input_width` inputs, indexed by the input
/// read as a base-`alphabet` number (first symbol most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub input_width: usize,
    pub output_width: usize,
    pub entries: Vec<Vec<u32>>,
}

impl Table {
    pub fn index(alphabet: u32, input: &[u32]) -> usize {
        input
            .iter()
            .fold(0usize, |acc, &d| acc * alphabet as usize + d as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCode {
    pub network: NetworkId,
    pub alphabet: u32,
    pub rates: RateSpec,
    pub edges: BTreeMap<String, Table>,
    pub decoders: BTreeMap<(String, String), Table>,
}

/// A borrowed edge or decoder function.
#[derive(Debug, Clone, Copy)]
pub enum Function<'a> {
    Linear(&'a Matrix),
    Table(u32, &'a Table),
}

impl Function<'_> {
    pub fn input_width(&self) -> usize {
        match self {
            Function::Linear(m) => m.cols(),
            Function::Table(_, t) => t.input_width,
        }
    }

    pub fn output_width(&self) -> usize {
        match self {
            Function::Linear(m) => m.rows(),
            Function::Table(_, t) => t.output_width,
        }
    }

    pub fn apply(&self, input: &[u32]) -> Vec<u32> {
        match self {
            Function::Linear(m) => m.apply(input),
            Function::Table(q, t) => t.entries[Table::index(*q, input)].clone(),
        }
    }

    /// Every output coordinate copies one input coordinate or is zero.
    pub fn is_routing(&self) -> bool {
        match self {
            Function::Linear(m) => (0..m.rows()).all(|r| {
                let row = m.row(r);
                let nonzero: Vec<&u32> = row.iter().filter(|&&v| v != 0).collect();
                nonzero.is_empty() || (nonzero.len() == 1 && *nonzero[0] == 1)
            }),
            Function::Table(q, t) => {
                let inputs = input_tuples(*q, t.input_width);
                (0..t.output_width).all(|j| {
                    let zero = t.entries.iter().all(|o| o[j] == 0);
                    zero || (0..t.input_width)
                        .any(|i| inputs.iter().zip(&t.entries).all(|(x, o)| o[j] == x[i]))
                })
            }
        }
    }
}

/// All inputs of the given width in index order.
pub(crate) fn input_tuples(q: u32, width: usize) -> Vec<Vec<u32>> {
    let size = (q as usize).pow(width as u32);
    (0..size)
        .map(|mut idx| {
            let mut v = vec![0u32; width];
            for slot in v.iter_mut().rev() {
                *slot = (idx % q as usize) as u32;
                idx /= q as usize;
            }
            v
        })
        .collect()
}

/// Common interface of linear and table codes.
pub trait Code: Sync {
    fn network(&self) -> NetworkId;
    fn alphabet(&self) -> u32;
    fn rates(&self) -> &RateSpec;
    fn edge_function(&self, edge: &str) -> Option<Function<'_>>;
    fn decoder_function(&self, receiver: &str, message: &str) -> Option<Function<'_>>;

    fn is_routing(&self) -> bool;
}

impl Code for LinearCode {
    fn network(&self) -> NetworkId {
        self.network
    }
    fn alphabet(&self) -> u32 {
        self.field.modulus()
    }
    fn rates(&self) -> &RateSpec {
        &self.rates
    }
    fn edge_function(&self, edge: &str) -> Option<Function<'_>> {
        self.edges.get(edge).map(Function::Linear)
    }
    fn decoder_function(&self, receiver: &str, message: &str) -> Option<Function<'_>> {
        self.decoders
            .get(&(receiver.to_string(), message.to_string()))
            .map(Function::Linear)
    }
    fn is_routing(&self) -> bool {
        self.edges
            .values()
            .chain(self.decoders.values())
            .all(|m| Function::Linear(m).is_routing())
    }
}

impl Code for TableCode {
    fn network(&self) -> NetworkId {
        self.network
    }
    fn alphabet(&self) -> u32 {
        self.alphabet
    }
    fn rates(&self) -> &RateSpec {
        &self.rates
    }
    fn edge_function(&self, edge: &str) -> Option<Function<'_>> {
        self.edges.get(edge).map(|t| Function::Table(self.alphabet, t))
    }
    fn decoder_function(&self, receiver: &str, message: &str) -> Option<Function<'_>> {
        self.decoders
            .get(&(receiver.to_string(), message.to_string()))
            .map(|t| Function::Table(self.alphabet, t))
    }
    fn is_routing(&self) -> bool {
        self.edges
            .values()
            .chain(self.decoders.values())
            .all(|t| Function::Table(self.alphabet, t).is_routing())
    }
}

pub fn is_routing<C: Code + ?Sized>(code: &C) -> bool {
    code.is_routing()
}

fn shape_error(what: String, rows: usize, cols: usize, got_rows: usize, got_cols: usize) -> CodeError {
    CodeError::BadShape {
        what,
        rows,
        cols,
        got_rows,
        got_cols,
    }
}

/// Checks that `code` fits `net`: every edge has a function of the right
/// shape, decoders belong to demands, and table sizes are complete.
pub fn check_structure<C: Code + ?Sized>(net: &Network, code: &C) -> Result<(), CodeError> {
    if net.name != code.network().as_str() {
        return Err(CodeError::NetworkMismatch {
            code: code.network().to_string(),
            net: net.name.clone(),
        });
    }
    let rates = code.rates();
    if rates.n == 0 {
        return Err(CodeError::ZeroEdgeDim);
    }
    for m in rates.message_dims.keys() {
        if net.message_index(m).is_none() {
            return Err(CodeError::UnknownMessage(m.clone()));
        }
    }
    for e in &net.edges {
        let f = code
            .edge_function(&e.id)
            .ok_or_else(|| CodeError::MissingEdge(e.id.clone()))?;
        let w = rates.local_width(net, &e.tail);
        if f.input_width() != w || f.output_width() != rates.n {
            return Err(shape_error(
                format!("edge {}", e.id),
                rates.n,
                w,
                f.output_width(),
                f.input_width(),
            ));
        }
        check_table(code.alphabet(), &f, &format!("edge {}", e.id))?;
    }
    for (r, m) in &net.demands {
        if let Some(f) = code.decoder_function(r, m) {
            let w = rates.local_width(net, r);
            let k = rates.k(m);
            if f.input_width() != w || f.output_width() != k {
                return Err(shape_error(
                    format!("decoder {r}:{m}"),
                    k,
                    w,
                    f.output_width(),
                    f.input_width(),
                ));
            }
            check_table(code.alphabet(), &f, &format!("decoder {r}:{m}"))?;
        }
    }
    Ok(())
}

fn check_table(q: u32, f: &Function<'_>, what: &str) -> Result<(), CodeError> {
    if let Function::Table(_, t) = f {
        let size = (q as u128).pow(t.input_width as u32);
        if t.entries.len() as u128 != size {
            return Err(CodeError::MissingTableEntry {
                function: what.to_string(),
                key: format!("(table has {} of {size} entries)", t.entries.len()),
            });
        }
        if t.entries.iter().any(|o| o.len() != t.output_width || o.iter().any(|&v| v >= q)) {
            return Err(CodeError::File(format!("{what}: malformed table output")));
        }
    }
    Ok(())
}

/// Per-demand outcome of a verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemandStatus {
    pub receiver: String,
    pub message: String,
    pub passed: bool,
    /// Decoder used or synthesized (rows over the receiver's local input).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoder: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A message assignment on which some demand fails. For a non-decodable
/// demand `other` is a second assignment that the receiver cannot tell
/// apart from `assignment` although the demanded message differs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub receiver: String,
    pub message: String,
    pub assignment: BTreeMap<String, Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<BTreeMap<String, Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoded: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub method: String,
    pub demands: Vec<DemandStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub rate_vector: RateVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignments_checked: Option<u64>,
}

impl VerificationReport {
    pub fn first_failure(&self) -> Option<&DemandStatus> {
        self.demands.iter().find(|d| !d.passed)
    }
}

/// Splits a flat message vector into per-message parts.
pub(crate) fn split_assignment(
    layout: &[(String, usize, usize)],
    flat: &[u32],
) -> BTreeMap<String, Vec<u32>> {
    layout
        .iter()
        .map(|(m, off, k)| (m.clone(), flat[*off..off + k].to_vec()))
        .collect()
}

/// Values on every edge and at every decoder for one assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub edges: BTreeMap<String, Vec<u32>>,
    pub decoded: BTreeMap<String, Vec<u32>>,
}

fn local_input_values(
    net: &Network,
    node: &str,
    assignment: &BTreeMap<String, Vec<u32>>,
    edges: &BTreeMap<String, Vec<u32>>,
) -> Vec<u32> {
    let mut v = Vec::new();
    for i in net.local_inputs(node) {
        match i {
            LocalInput::Message(m) => v.extend(assignment.get(&m).into_iter().flatten()),
            LocalInput::Edge(e) => v.extend(edges.get(&e).into_iter().flatten()),
        }
    }
    v
}

/// Evaluates every edge in topological order, then every decoder present.
pub fn evaluate_code<C: Code + ?Sized>(
    net: &Network,
    code: &C,
    assignment: &BTreeMap<String, Vec<u32>>,
) -> Result<Evaluation, CodeError> {
    check_structure(net, code)?;
    let q = code.alphabet();
    for m in &net.messages {
        let k = code.rates().k(m);
        let got = assignment.get(m).map_or(0, Vec::len);
        if got != k {
            return Err(CodeError::BadAssignment(format!(
                "message {m} has {got} symbols, expected {k}"
            )));
        }
    }
    if let Some(m) = assignment.keys().find(|m| net.message_index(m).is_none()) {
        return Err(CodeError::UnknownMessage(m.clone()));
    }
    if assignment.values().flatten().any(|&v| v >= q) {
        return Err(CodeError::BadAssignment(format!("symbols must lie in 0..{q}")));
    }
    let mut edges = BTreeMap::new();
    for e in net.edges_in_order()? {
        let input = local_input_values(net, &e.tail, assignment, &edges);
        let f = code
            .edge_function(&e.id)
            .ok_or_else(|| CodeError::MissingEdge(e.id.clone()))?;
        edges.insert(e.id.clone(), f.apply(&input));
    }
    let mut decoded = BTreeMap::new();
    for (r, m) in &net.demands {
        if let Some(f) = code.decoder_function(r, m) {
            let input = local_input_values(net, r, assignment, &edges);
            decoded.insert(format!("{r}:{m}"), f.apply(&input));
        }
    }
    Ok(Evaluation { edges, decoded })
}

/// Global transfer matrices of a linear code: each edge and each receiver
/// input as a matrix over the full message vector.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub layout: Vec<(String, usize, usize)>,
    pub total: usize,
    pub edges: BTreeMap<String, Matrix>,
}

impl Transfer {
    pub fn selector(&self, field: PrimeField, message: &str) -> Matrix {
        let mut s = Matrix::zeros(field, 0, self.total);
        if let Some((_, off, k)) = self.layout.iter().find(|(m, _, _)| m == message) {
            s = Matrix::zeros(field, *k, self.total);
            for i in 0..*k {
                s.set(i, off + i, 1);
            }
        }
        s
    }

    /// Stack of the node's local inputs as global rows.
    pub fn node_input(&self, net: &Network, field: PrimeField, node: &str) -> Result<Matrix, CodeError> {
        let mut out = Matrix::zeros(field, 0, self.total);
        for i in net.local_inputs(node) {
            let part = match &i {
                LocalInput::Message(m) => self.selector(field, m),
                LocalInput::Edge(e) => self
                    .edges
                    .get(e)
                    .cloned()
                    .ok_or_else(|| CodeError::MissingEdge(e.clone()))?,
            };
            out = out.stack(&part)?;
        }
        Ok(out)
    }
}

impl LinearCode {
    pub fn check(&self, net: &Network) -> Result<(), CodeError> {
        check_structure(net, self)?;
        for m in self.edges.values().chain(self.decoders.values()) {
            if m.field() != self.field {
                return Err(FieldError::FieldMismatch(self.field.modulus(), m.field().modulus()).into());
            }
        }
        if let Some(id) = self.edges.keys().find(|id| net.edge(id).is_none()) {
            return Err(CodeError::UnknownEdge(id.clone()));
        }
        if let Some((r, m)) = self
            .decoders
            .keys()
            .find(|(r, m)| !net.demands.contains(&(r.clone(), m.clone())))
        {
            return Err(CodeError::UnknownDemand(r.clone(), m.clone()));
        }
        Ok(())
    }

    pub fn transfer(&self, net: &Network) -> Result<Transfer, CodeError> {
        self.check(net)?;
        let layout = self.rates.layout(net);
        let total = self.rates.total();
        let mut t = Transfer {
            layout,
            total,
            edges: BTreeMap::new(),
        };
        for e in net.edges_in_order()? {
            let input = t.node_input(net, self.field, &e.tail)?;
            let g = self.edges[&e.id].mul(&input)?;
            t.edges.insert(e.id.clone(), g);
        }
        Ok(t)
    }

    /// Decoder for every decodable demand, solving `D · T = selector`.
    pub fn synthesize_decoders(&self, net: &Network) -> Result<BTreeMap<(String, String), Matrix>, CodeError> {
        let t = self.transfer(net)?;
        let mut out = BTreeMap::new();
        for (r, m) in &net.demands {
            let input = t.node_input(net, self.field, r)?;
            if let Some(d) = input.solve_left(&t.selector(self.field, m))? {
                out.insert((r.clone(), m.clone()), d);
            }
        }
        Ok(out)
    }

    /// Attaches synthesized decoders; fails if some demand is not decodable.
    pub fn with_decoders(mut self, net: &Network) -> Result<Self, CodeError> {
        let dec = self.synthesize_decoders(net)?;
        for (r, m) in &net.demands {
            if !dec.contains_key(&(r.clone(), m.clone())) {
                return Err(CodeError::NotDecodable {
                    receiver: r.clone(),
                    message: m.clone(),
                    modulus: self.field.modulus(),
                });
            }
        }
        self.decoders = dec;
        Ok(self)
    }

    /// The same matrices read over another field (decoders dropped, since
    /// they generally do not transfer).
    pub fn reinterpret(&self, field: PrimeField) -> LinearCode {
        LinearCode {
            network: self.network,
            field,
            rates: self.rates.clone(),
            edges: self.edges.iter().map(|(k, m)| (k.clone(), m.reinterpret(field))).collect(),
            decoders: BTreeMap::new(),
        }
    }

    /// The code obtained by fixing the listed messages to zero: their
    /// dimensions become 0 and the corresponding input columns disappear.
    pub fn zero_messages(&self, net: &Network, messages: &[&str]) -> Result<LinearCode, CodeError> {
        self.check(net)?;
        for m in messages {
            if net.message_index(m).is_none() {
                return Err(CodeError::UnknownMessage(m.to_string()));
            }
        }
        let mut rates = self.rates.clone();
        for m in messages {
            rates.message_dims.insert(m.to_string(), 0);
        }
        let keep_cols = |node: &str| -> Vec<usize> {
            let mut cols = Vec::new();
            let mut off = 0;
            for i in net.local_inputs(node) {
                let (w, keep) = match &i {
                    LocalInput::Message(m) => (self.rates.k(m), !messages.contains(&m.as_str())),
                    LocalInput::Edge(_) => (self.rates.n, true),
                };
                if keep {
                    cols.extend(off..off + w);
                }
                off += w;
            }
            cols
        };
        let edges = net
            .edges
            .iter()
            .map(|e| (e.id.clone(), self.edges[&e.id].select_cols(&keep_cols(&e.tail))))
            .collect();
        let decoders = self
            .decoders
            .iter()
            .map(|((r, m), d)| {
                let cols = keep_cols(r);
                let d = if messages.contains(&m.as_str()) {
                    Matrix::zeros(self.field, 0, cols.len())
                } else {
                    d.select_cols(&cols)
                };
                ((r.clone(), m.clone()), d)
            })
            .collect();
        Ok(LinearCode {
            network: self.network,
            field: self.field,
            rates,
            edges,
            decoders,
        })
    }

    /// Lookup-table form of the same code.
    pub fn to_table(&self, net: &Network) -> Result<TableCode, CodeError> {
        self.check(net)?;
        let q = self.field.modulus();
        let tab = |m: &Matrix| -> Result<Table, CodeError> {
            let size = (q as u128).pow(m.cols() as u32);
            if size > DEFAULT_GUARD as u128 {
                return Err(CodeError::GuardExceeded {
                    size,
                    guard: DEFAULT_GUARD,
                });
            }
            Ok(Table {
                input_width: m.cols(),
                output_width: m.rows(),
                entries: input_tuples(q, m.cols()).iter().map(|x| m.apply(x)).collect(),
            })
        };
        Ok(TableCode {
            network: self.network,
            alphabet: q,
            rates: self.rates.clone(),
            edges: self
                .edges
                .iter()
                .map(|(k, m)| Ok((k.clone(), tab(m)?)))
                .collect::<Result<_, CodeError>>()?,
            decoders: self
                .decoders
                .iter()
                .map(|(k, m)| Ok((k.clone(), tab(m)?)))
                .collect::<Result<_, CodeError>>()?,
        })
    }

    /// Global formula of an edge, e.g. `(a1+b1, c1)`, for display.
    pub fn describe_edge(&self, net: &Network, edge: &str) -> Result<String, CodeError> {
        let t = self.transfer(net)?;
        let g = t.edges.get(edge).ok_or_else(|| CodeError::UnknownEdge(edge.to_string()))?;
        Ok(describe_rows(g, &t.layout))
    }
}

/// Renders global rows as formulas over message coordinates.
pub fn describe_rows(g: &Matrix, layout: &[(String, usize, usize)]) -> String {
    let p = g.field().modulus();
    let coords: Vec<String> = (0..g.rows())
        .map(|r| {
            let mut s = String::new();
            for (m, off, k) in layout {
                for i in 0..*k {
                    let v = g.get(r, off + i);
                    if v == 0 {
                        continue;
                    }
                    let name = if *k == 1 { m.clone() } else { format!("{m}{}", i + 1) };
                    let (neg, mag) = if p > 2 && v == p - 1 { (true, 1) } else { (false, v) };
                    if s.is_empty() {
                        if neg {
                            s.push('-');
                        }
                    } else {
                        s.push_str(if neg { "-" } else { "+" });
                    }
                    if mag != 1 {
                        s.push_str(&mag.to_string());
                    }
                    s.push_str(&name);
                }
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        })
        .collect();
    if coords.len() == 1 {
        coords[0].clone()
    } else {
        format!("({})", coords.join(", "))
    }
}

/// Algebraic verification: each demand passes iff the demanded message's
/// selector rows lie in the row space of the receiver's global input; when
/// the code carries a decoder for the demand, `decoder · input = selector`
/// must also hold exactly.
pub fn verify_solution(net: &Network, code: &LinearCode) -> Result<VerificationReport, CodeError> {
    let f = code.field;
    let t = code.transfer(net)?;
    let mut demands = Vec::new();
    let mut witness = None;
    for (r, m) in &net.demands {
        let input = t.node_input(net, f, r)?;
        let sel = t.selector(f, m);
        let solvable = input.rowspace_contains(&sel)?;
        let mut status = DemandStatus {
            receiver: r.clone(),
            message: m.clone(),
            passed: solvable,
            decoder: None,
            detail: None,
        };
        if !solvable {
            status.detail = Some(format!("{m} is not in the span of the inputs at {r}"));
            if witness.is_none() {
                witness = kernel_witness(&t, &input, &sel, r, m);
            }
        } else if let Some(d) = code.decoders.get(&(r.clone(), m.clone())) {
            let product = d.mul(&input)?;
            status.decoder = Some(d.to_rows());
            if product != sel {
                status.passed = false;
                status.detail = Some("supplied decoder does not reproduce the message".into());
                if witness.is_none() {
                    witness = decoder_witness(code, net, &t, &product, &sel, r, m)?;
                }
            }
        } else {
            status.decoder = input.solve_left(&sel)?.map(|d| d.to_rows());
        }
        demands.push(status);
    }
    Ok(VerificationReport {
        valid: demands.iter().all(|d| d.passed),
        method: "algebraic".into(),
        demands,
        witness,
        rate_vector: code.rates.rate_vector(),
        assignments_checked: None,
    })
}

/// A kernel vector of the receiver's input that moves the demanded message:
/// it and the zero assignment look identical at the receiver.
fn kernel_witness(t: &Transfer, input: &Matrix, sel: &Matrix, r: &str, m: &str) -> Option<Witness> {
    let kernel = input.nullspace();
    (0..kernel.rows()).find_map(|i| {
        let v = kernel.row(i).to_vec();
        if sel.apply(&v).iter().all(|&x| x == 0) {
            return None;
        }
        Some(Witness {
            receiver: r.to_string(),
            message: m.to_string(),
            assignment: split_assignment(&t.layout, &v),
            other: Some(split_assignment(&t.layout, &vec![0; t.total])),
            decoded: None,
        })
    })
}

/// A unit assignment on which the supplied decoder is wrong.
fn decoder_witness(
    code: &LinearCode,
    net: &Network,
    t: &Transfer,
    product: &Matrix,
    sel: &Matrix,
    r: &str,
    m: &str,
) -> Result<Option<Witness>, CodeError> {
    let Some(col) = (0..t.total).find(|&c| (0..sel.rows()).any(|i| product.get(i, c) != sel.get(i, c)))
    else {
        return Ok(None);
    };
    let mut v = vec![0u32; t.total];
    v[col] = 1;
    let assignment = split_assignment(&t.layout, &v);
    let eval = evaluate_code(net, code, &assignment)?;
    Ok(Some(Witness {
        receiver: r.to_string(),
        message: m.to_string(),
        assignment,
        other: None,
        decoded: eval.decoded.get(&format!("{r}:{m}")).cloned(),
    }))
}

/// Time-sharing: block-diagonal combination with `k_i = Σ k_i^(j)` and
/// `n = Σ n^(j)`. Coordinates of each message and edge list the first
/// code's block first.
pub fn concatenate_codes(net: &Network, codes: &[LinearCode]) -> Result<LinearCode, CodeError> {
    let first = codes
        .first()
        .ok_or_else(|| CodeError::Incompatible("no codes given".into()))?;
    for c in codes {
        if c.network != first.network {
            return Err(CodeError::Incompatible(format!(
                "networks {} and {}",
                first.network, c.network
            )));
        }
        if c.field != first.field {
            return Err(CodeError::Incompatible(format!(
                "fields GF({}) and GF({})",
                first.field.modulus(),
                c.field.modulus()
            )));
        }
        c.check(net)?;
    }
    let f = first.field;
    let mut rates = RateSpec {
        message_dims: net.messages.iter().map(|m| (m.clone(), 0)).collect(),
        n: codes.iter().map(|c| c.rates.n).sum(),
    };
    for c in codes {
        for (m, k) in &c.rates.message_dims {
            *rates.message_dims.get_mut(m).expect("checked message") += k;
        }
    }

    // column position of (code j, local coordinate) inside the combined input
    let column_map = |node: &str| -> Vec<Vec<usize>> {
        let inputs = net.local_inputs(node);
        let mut maps: Vec<Vec<usize>> = vec![Vec::new(); codes.len()];
        let mut base = 0;
        for i in &inputs {
            let widths: Vec<usize> = codes
                .iter()
                .map(|c| match i {
                    LocalInput::Message(m) => c.rates.k(m),
                    LocalInput::Edge(_) => c.rates.n,
                })
                .collect();
            let mut off = base;
            for (j, w) in widths.iter().enumerate() {
                maps[j].extend(off..off + w);
                off += w;
            }
            base = off;
        }
        maps
    };
    let block = |node: &str, parts: Vec<&Matrix>| -> Matrix {
        let maps = column_map(node);
        let width: usize = maps.iter().map(Vec::len).sum();
        let rows: usize = parts.iter().map(|p| p.rows()).sum();
        let mut out = Matrix::zeros(f, rows, width);
        let mut r0 = 0;
        for (j, p) in parts.iter().enumerate() {
            for r in 0..p.rows() {
                for c in 0..p.cols() {
                    out.set(r0 + r, maps[j][c], p.get(r, c));
                }
            }
            r0 += p.rows();
        }
        out
    };

    let edges = net
        .edges
        .iter()
        .map(|e| {
            let parts = codes.iter().map(|c| &c.edges[&e.id]).collect();
            (e.id.clone(), block(&e.tail, parts))
        })
        .collect();
    let mut decoders = BTreeMap::new();
    for (r, m) in &net.demands {
        let key = (r.clone(), m.clone());
        if codes.iter().all(|c| c.decoders.contains_key(&key)) {
            let parts = codes.iter().map(|c| &c.decoders[&key]).collect();
            decoders.insert(key, block(r, parts));
        }
    }
    Ok(LinearCode {
        network: first.network,
        field: f,
        rates,
        edges,
        decoders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::builtin_network;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn code(id: NetworkId, label: &str, p: u32) -> LinearCode {
        builtin_codes(id)
            .into_iter()
            .find(|c| c.label == label)
            .unwrap_or_else(|| panic!("no code {label}"))
            .build(gf(p))
            .unwrap()
    }

    fn asg(pairs: &[(&str, &[u32])]) -> BTreeMap<String, Vec<u32>> {
        pairs.iter().map(|(m, v)| (m.to_string(), v.to_vec())).collect()
    }

    #[test]
    fn butterfly_evaluation() {
        let net = builtin_network(NetworkId::GButterfly);
        let c = code(NetworkId::GButterfly, "(0,1,1,0)", 2);
        let ev = evaluate_code(&net, &c, &asg(&[("a", &[]), ("b", &[1]), ("c", &[1]), ("d", &[])])).unwrap();
        assert_eq!(ev.edges["x"], vec![1]);
        assert_eq!(ev.edges["y"], vec![0]);
        assert_eq!(ev.edges["z"], vec![1]);
        assert_eq!(ev.decoded["R5:c"], vec![1]);
        assert_eq!(ev.decoded["R6:b"], vec![1]);
        let ev = evaluate_code(&net, &c, &asg(&[("a", &[]), ("b", &[0]), ("c", &[0]), ("d", &[])])).unwrap();
        assert!(ev.edges.values().flatten().all(|&v| v == 0));
    }

    #[test]
    fn nonfano_n15_decoder() {
        let net = builtin_network(NetworkId::NonFano);
        let c = code(NetworkId::NonFano, "(1,1,1)", 3);
        let ev = evaluate_code(&net, &c, &asg(&[("a", &[1]), ("b", &[2]), ("c", &[1])])).unwrap();
        assert_eq!(ev.edges["w"], vec![0]);
        assert_eq!(ev.edges["x"], vec![2]);
        assert_eq!(ev.edges["y"], vec![0]);
        assert_eq!(ev.edges["z"], vec![1]);
        assert_eq!(ev.decoded["n15:c"], vec![1]);
        // (x + y - w) / 2 recovers c, while (w - y + x) / 2 gives a
        let f = gf(3);
        let half = f.inv(2);
        let (w, x, y) = (0, 2, 0);
        assert_eq!(f.mul(f.sub(f.add(x, y), w), half), 1);
        assert_eq!(f.mul(f.add(f.sub(w, y), x), half), 1);
        for (a, b, cc) in [(1u32, 0u32, 2u32), (2, 1, 0), (0, 2, 1)] {
            let w = f.add(a, b);
            let x = f.add(a, cc);
            let y = f.add(b, cc);
            assert_eq!(f.mul(f.sub(f.add(x, y), w), half), cc);
            assert_eq!(f.mul(f.add(f.sub(w, y), x), half), a);
        }
    }

    #[test]
    fn evaluate_rejects_bad_assignments() {
        let net = builtin_network(NetworkId::Fano);
        let c = code(NetworkId::Fano, "(1,1,1)", 2);
        assert!(evaluate_code(&net, &c, &asg(&[("a", &[1]), ("b", &[1])])).is_err());
        assert!(evaluate_code(&net, &c, &asg(&[("a", &[1]), ("b", &[1]), ("c", &[2])])).is_err());
        assert!(evaluate_code(&net, &c, &asg(&[("a", &[1, 0]), ("b", &[1]), ("c", &[0])])).is_err());
    }

    #[test]
    fn fano_locality_fails_in_odd_characteristic() {
        let net = builtin_network(NetworkId::Fano);
        let c = code(NetworkId::Fano, "(1,1,1)", 2);
        assert!(verify_solution(&net, &c).unwrap().valid);
        let odd = c.reinterpret(gf(3));
        let rep = verify_solution(&net, &odd).unwrap();
        assert!(!rep.valid);
        let failed: Vec<_> = rep.demands.iter().filter(|d| !d.passed).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!((failed[0].receiver.as_str(), failed[0].message.as_str()), ("n12", "c"));
        let w = rep.witness.unwrap();
        assert_eq!(w.receiver, "n12");
        // the witness is invisible at n12 but moves c
        let ev = evaluate_code(&net, &odd, &w.assignment).unwrap();
        assert_eq!(ev.edges["x_n12"], vec![0]);
        assert_eq!(w.assignment["a"], vec![0]);
        assert_ne!(w.assignment["c"], vec![0]);
    }

    #[test]
    fn nonfano_rejected_over_gf2() {
        let net = builtin_network(NetworkId::NonFano);
        let c = code(NetworkId::NonFano, "(1,1,1)", 3).reinterpret(gf(2));
        let rep = verify_solution(&net, &c).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.first_failure().unwrap().receiver, "n15");
    }

    #[test]
    fn corrupted_decoder_is_caught() {
        let net = builtin_network(NetworkId::GButterfly);
        let mut c = code(NetworkId::GButterfly, "(1,0,1,1)", 2);
        let key = ("R5".to_string(), "a".to_string());
        let d = c.decoders[&key].clone();
        let mut bad = d.clone();
        bad.set(0, 0, 1 - d.get(0, 0));
        c.decoders.insert(key, bad);
        let rep = verify_solution(&net, &c).unwrap();
        assert!(!rep.valid);
        let w = rep.witness.unwrap();
        assert_eq!((w.receiver.as_str(), w.message.as_str()), ("R5", "a"));
        assert_ne!(w.decoded.unwrap(), w.assignment["a"]);
    }

    #[test]
    fn routing_detection() {
        assert!(code(NetworkId::GButterfly, "(2,0,0,1)", 2).is_routing());
        assert!(!code(NetworkId::GButterfly, "(0,1,1,0)", 2).is_routing());
        let net = builtin_network(NetworkId::GButterfly);
        let empty = catalog::CatalogCode::new(NetworkId::GButterfly, "empty", FieldClaim::Any, &[0, 0, 0, 0], 1, &[])
            .build(gf(2))
            .unwrap();
        assert!(empty.is_routing());
        assert!(verify_solution(&net, &empty).unwrap().valid);
        // table form agrees
        let t = code(NetworkId::GButterfly, "(2,0,0,1)", 3).to_table(&net).unwrap();
        assert!(t.is_routing());
        let t = code(NetworkId::GButterfly, "(0,1,1,0)", 3).to_table(&net).unwrap();
        assert!(!t.is_routing());
    }

    #[test]
    fn time_sharing_butterfly() {
        let net = builtin_network(NetworkId::GButterfly);
        let parts: Vec<LinearCode> = ["(1,0,1,1)", "(1,1,0,1)", "(0,1,1,0)"]
            .iter()
            .map(|l| code(NetworkId::GButterfly, l, 2))
            .collect();
        let c = concatenate_codes(&net, &parts).unwrap();
        assert_eq!(c.rates.n, 3);
        assert!(c.rates.message_dims.values().all(|&k| k == 2));
        assert!(verify_solution(&net, &c).unwrap().valid);
        assert_eq!(c.describe_edge(&net, "x").unwrap(), "(a1, a2, b2)");
        assert_eq!(c.describe_edge(&net, "y").unwrap(), "(c1, b1, b2+c2)");
        assert_eq!(c.describe_edge(&net, "z").unwrap(), "(d1, d2, c2)");
        assert_eq!(rate_vector(&c).to_string(), "(2/3,2/3,2/3,2/3)");
        let single = concatenate_codes(&net, &parts[..1]).unwrap();
        assert_eq!(single, parts[0]);
    }

    #[test]
    fn time_sharing_fano_routing() {
        let net = builtin_network(NetworkId::Fano);
        let parts = vec![code(NetworkId::Fano, "(0,1,1)", 2), code(NetworkId::Fano, "(1,0,1)", 2)];
        let c = concatenate_codes(&net, &parts).unwrap();
        assert_eq!(rate_vector(&c).to_string(), "(1/2,1/2,1)");
        assert_eq!(c.rates.message_dims["c"], 2);
        assert!(verify_solution(&net, &c).unwrap().valid);
        let mixed = vec![parts[0].clone(), parts[1].reinterpret(gf(3))];
        assert!(matches!(concatenate_codes(&net, &mixed), Err(CodeError::Incompatible(_))));
        assert!(concatenate_codes(&net, &[]).is_err());
    }

    #[test]
    fn zeroing_messages_keeps_validity() {
        let net = builtin_network(NetworkId::NonFano);
        let c = code(NetworkId::NonFano, "(1,1,1)", 3);
        let z = c.zero_messages(&net, &["b"]).unwrap();
        assert_eq!(rate_vector(&z).to_string(), "(1,0,1)");
        assert!(verify_solution(&net, &z).unwrap().valid);
        let z = c.zero_messages(&net, &["a", "b", "c"]).unwrap();
        assert!(rate_vector(&z).is_origin());
        assert!(verify_solution(&net, &z).unwrap().valid);
    }

    #[test]
    fn rate_vectors() {
        assert_eq!(rate_vector(&code(NetworkId::Fano, "(4/5,4/5,4/5)", 3)).to_string(), "(4/5,4/5,4/5)");
        assert_eq!(rate_vector(&code(NetworkId::NonFano, "(1,1,1/2)", 2)).to_string(), "(1,1,1/2)");
    }

    #[test]
    fn structural_errors() {
        let net = builtin_network(NetworkId::Fano);
        let other = builtin_network(NetworkId::NonFano);
        let mut c = code(NetworkId::Fano, "(1,1,1)", 2);
        assert!(matches!(verify_solution(&other, &c), Err(CodeError::NetworkMismatch { .. })));
        c.edges.insert("w".into(), Matrix::zeros(gf(2), 1, 3));
        assert!(matches!(verify_solution(&net, &c), Err(CodeError::BadShape { .. })));
        c.edges.remove("w");
        assert!(matches!(verify_solution(&net, &c), Err(CodeError::MissingEdge(_))));
    }
}
