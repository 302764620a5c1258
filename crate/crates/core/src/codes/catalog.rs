//! The printed achieving codes of each network, stored as global message
//! formulas and factored into local edge matrices on demand.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{concatenate_codes, verify_solution, CodeError, Formula, LinearCode, RateSpec, RateVector, Transfer};
use crate::ff::{Characteristic, Matrix, PrimeField};
use crate::netmodel::{builtin_network, Network, NetworkId};
use crate::rateregion::{builtin_region, canonical_class, enumerate_vertices, format_point, RegionClass, RegionError};

/// Characteristic class a code is claimed to work in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldClaim {
    Even,
    Odd,
    Any,
}

impl FieldClaim {
    /// Representative fields used to check the claim.
    pub fn moduli(self) -> &'static [u32] {
        match self {
            FieldClaim::Even => &[2],
            FieldClaim::Odd => &[3],
            FieldClaim::Any => &[2, 3],
        }
    }

    pub fn admits(self, c: Characteristic) -> bool {
        matches!(
            (self, c),
            (FieldClaim::Any, _) | (FieldClaim::Even, Characteristic::Even) | (FieldClaim::Odd, Characteristic::Odd)
        )
    }
}

/// A printed code: per-edge global formulas. Keys may name several edges
/// carrying the same formula, written `x=y`.
#[derive(Debug, Clone)]
pub struct CatalogCode {
    pub network: NetworkId,
    pub label: String,
    pub claim: FieldClaim,
    pub dims: Vec<usize>,
    pub n: usize,
    pub formulas: Vec<(String, String)>,
}

impl CatalogCode {
    pub fn new(
        network: NetworkId,
        label: &str,
        claim: FieldClaim,
        dims: &[usize],
        n: usize,
        formulas: &[(&str, &str)],
    ) -> Self {
        CatalogCode {
            network,
            label: label.to_string(),
            claim,
            dims: dims.to_vec(),
            n,
            formulas: formulas
                .iter()
                .map(|(e, f)| (e.to_string(), f.to_string()))
                .collect(),
        }
    }

    /// Edge id → formula text, with `x=y` keys expanded.
    pub fn edge_formulas(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for (edges, f) in &self.formulas {
            for e in edges.split('=') {
                out.insert(e.trim().to_string(), f.clone());
            }
        }
        out
    }

    /// Factors the formulas into local edge matrices over `field` and
    /// attaches synthesized decoders for every decodable demand.
    ///
    /// Edges without a formula are copies when their tail is a relay (one
    /// in-edge, no messages); a formula-less feeder from a source carries the
    /// part of its head's outgoing formula that involves the source's own
    /// messages; any other edge is zero.
    pub fn build(&self, field: PrimeField) -> Result<LinearCode, CodeError> {
        let net = builtin_network(self.network);
        let rates = RateSpec::new(&net, &self.dims, self.n)?;
        let layout = rates.layout(&net);
        let total = rates.total();
        let mut targets = BTreeMap::new();
        for (e, text) in self.edge_formulas() {
            if net.edge(&e).is_none() {
                return Err(CodeError::UnknownEdge(e));
            }
            let f = Formula::parse(&text)?;
            if f.width() != self.n {
                return Err(CodeError::Formula(format!(
                    "edge {e} has {} coordinates, expected n={}",
                    f.width(),
                    self.n
                )));
            }
            targets.insert(e, f.to_matrix(field, &layout, total)?);
        }
        let mut t = Transfer {
            layout: layout.clone(),
            total,
            edges: BTreeMap::new(),
        };
        let mut edges = BTreeMap::new();
        for e in net.edges_in_order()? {
            let input = t.node_input(&net, field, &e.tail)?;
            let target = match targets.get(&e.id) {
                Some(g) => Some(g.clone()),
                None => feeder_target(&net, &t, &targets, field, &e.tail, &e.head),
            };
            let local = match target {
                Some(g) => input.solve_left(&g)?.ok_or_else(|| CodeError::NotLocal {
                    edge: e.id.clone(),
                    modulus: field.modulus(),
                })?,
                None if !net.named_edges.contains_key(&e.id)
                    && net.local_messages(&e.tail).is_empty()
                    && net.in_edges(&e.tail).len() == 1 =>
                {
                    Matrix::identity(field, self.n)
                }
                None => Matrix::zeros(field, self.n, input.rows()),
            };
            let global = local.mul(&input)?;
            t.edges.insert(e.id.clone(), global);
            edges.insert(e.id.clone(), local);
        }
        let code = LinearCode {
            network: self.network,
            field,
            rates,
            edges,
            decoders: BTreeMap::new(),
        };
        let decoders = code.synthesize_decoders(&net)?;
        Ok(LinearCode { decoders, ..code })
    }
}

/// For a formula-less edge out of a pure source into a node whose outgoing
/// edge has a formula: that formula restricted to the source's messages.
fn feeder_target(
    net: &Network,
    t: &Transfer,
    targets: &BTreeMap<String, Matrix>,
    field: PrimeField,
    tail: &str,
    head: &str,
) -> Option<Matrix> {
    if !net.in_edges(tail).is_empty() || net.local_messages(tail).is_empty() {
        return None;
    }
    let downstream = net.out_edges(head).into_iter().find_map(|o| targets.get(&o.id))?;
    let own: Vec<usize> = t
        .layout
        .iter()
        .filter(|(m, _, _)| net.local_messages(tail).contains(&m.as_str()))
        .flat_map(|(_, off, k)| *off..off + k)
        .collect();
    let mut g = Matrix::zeros(field, downstream.rows(), downstream.cols());
    for r in 0..g.rows() {
        for &c in &own {
            g.set(r, c, downstream.get(r, c));
        }
    }
    Some(g)
}

fn entry(
    id: NetworkId,
    label: &str,
    claim: FieldClaim,
    dims: &[usize],
    n: usize,
    formulas: &[(&str, &str)],
) -> CatalogCode {
    CatalogCode::new(id, label, claim, dims, n, formulas)
}

/// Every printed achieving code of a network with its claimed field class.
pub fn builtin_codes(id: NetworkId) -> Vec<CatalogCode> {
    use FieldClaim::*;
    use NetworkId::*;
    let e = |label: &str, claim, dims: &[usize], n, formulas: &[(&str, &str)]| entry(id, label, claim, dims, n, formulas);
    match id {
        GButterfly => vec![
            e("(2,0,0,1)", Any, &[2, 0, 0, 1], 1, &[("x", "a1"), ("y", "a2"), ("z", "d")]),
            e("(1,0,0,2)", Any, &[1, 0, 0, 2], 1, &[("x", "a"), ("y", "d1"), ("z", "d2")]),
            e("(1,0,1,1)", Any, &[1, 0, 1, 1], 1, &[("x", "a"), ("y", "c"), ("z", "d")]),
            e("(1,1,0,1)", Any, &[1, 1, 0, 1], 1, &[("x", "a"), ("y", "b"), ("z", "d")]),
            e("(0,1,1,0)", Any, &[0, 1, 1, 0], 1, &[("x", "b"), ("y", "b+c"), ("z", "c")]),
            e(
                "routing (1/2,1/2,1/2,1/2)",
                Any,
                &[1, 1, 1, 1],
                2,
                &[("x", "(0, a)"), ("y", "(b, c)"), ("z", "(d, 0)")],
            ),
            e(
                "uniform (2/3,2/3,2/3,2/3)",
                Any,
                &[2, 2, 2, 2],
                3,
                &[("x", "(a1, a2, b2)"), ("y", "(c1, b1, b2+c2)"), ("z", "(d1, d2, c2)")],
            ),
        ],
        Fano => vec![
            e("(0,1,1)", Any, &[0, 1, 1], 1, &[("x=y", "c"), ("w=z", "b")]),
            e("(1,0,1)", Any, &[1, 0, 1], 1, &[("x=y", "c"), ("w=z", "a")]),
            e("(1,1,0)", Any, &[1, 1, 0], 1, &[("x=y", "b"), ("w=z", "a")]),
            e("(0,2,0)", Any, &[0, 2, 0], 1, &[("x=y", "b1"), ("w=z", "b2")]),
            e(
                "(1,1,1)",
                Even,
                &[1, 1, 1],
                1,
                &[("w", "a+b"), ("y", "b+c"), ("x", "a+c"), ("z", "a+b+c")],
            ),
            e(
                "(1,2/3,2/3)",
                Odd,
                &[3, 2, 2],
                3,
                &[
                    ("w", "(a1+b1, a2+b2, a3)"),
                    ("x", "(a1-c1, a2-c2, a2+b2)"),
                    ("y", "(b1+c1, b2+c2, b1)"),
                    ("z", "(a1+b1-c1, a2+b2+c2, a3)"),
                ],
            ),
            e(
                "(2/3,2/3,1)",
                Odd,
                &[2, 2, 3],
                3,
                &[
                    ("w", "(a1+b1, a2+b2, b2)"),
                    ("x", "(a1-c1, a2-c2, c3)"),
                    ("y", "(b1+c1, b2+c2, c3)"),
                    ("z", "(a1+b1-c1, a2-b2-c2, c1)"),
                ],
            ),
            e(
                "(4/5,4/5,4/5)",
                Odd,
                &[4, 4, 4],
                5,
                &[
                    ("w", "(a1+b1, a2+b2, a3+b3, a4+b4, b1+b4)"),
                    ("x", "(c1+a1, c2+a2, c3-a3, c4-a4, a3+b3)"),
                    ("y", "(c1-b1, c2-b2, c3+b3, c4+b4, b2)"),
                    ("z", "(a1+b1+c1, a2+b2+c2, a3+b3+c3, a4+b4+c4, b1+b4+c4)"),
                ],
            ),
        ],
        NonFano => vec![
            e(
                "(1,1,1)",
                Odd,
                &[1, 1, 1],
                1,
                &[("w", "a+b"), ("y", "b+c"), ("x", "a+c"), ("z", "a+b+c")],
            ),
            e(
                "(1,1,1/2)",
                Any,
                &[2, 2, 1],
                2,
                &[
                    ("w", "(a1, b1)"),
                    ("y", "(b1+c, b2)"),
                    ("x", "(a1+c, a2)"),
                    ("z", "(a1+b1+c, a2+b2)"),
                ],
            ),
            e(
                "(1,1/2,1)",
                Any,
                &[2, 1, 2],
                2,
                &[
                    ("w", "(a1+b, a2)"),
                    ("x", "(a1, c1)"),
                    ("y", "(c1+b, c2)"),
                    ("z", "(a1+c1+b, a2+c2)"),
                ],
            ),
            e(
                "(1/2,1,1)",
                Any,
                &[1, 2, 2],
                2,
                &[
                    ("w", "(b1+a, b2)"),
                    ("x", "(c1+a, c2)"),
                    ("y", "(c1, b1)"),
                    ("z", "(c1+b1+a, c2+b2)"),
                ],
            ),
            e("(0,0,1)", Any, &[0, 0, 1], 1, &[("y=z", "c")]),
            e("(1,0,0)", Any, &[1, 0, 0], 1, &[("z", "a")]),
            e("(0,1,0)", Any, &[0, 1, 0], 1, &[("z", "b")]),
        ],
        Vamos => vec![
            e("(0,0,0,0)", Any, &[0, 0, 0, 0], 1, &[]),
            e("(1,0,0,0)", Any, &[1, 0, 0, 0], 1, &[("x=y=z", "a")]),
            e("(0,0,0,1)", Any, &[0, 0, 0, 1], 1, &[("w=x=y=z", "d")]),
            e("(1,0,1,0)", Any, &[1, 0, 1, 0], 1, &[("w", "c"), ("x=y=z", "a")]),
            e("(0,2,0,0)", Any, &[0, 2, 0, 0], 1, &[("w=x", "b1"), ("y=z", "b2")]),
            e("(0,0,2,0)", Any, &[0, 0, 2, 0], 1, &[("w=x", "c1"), ("y=z", "c2")]),
            e("(1,1,1,0)", Any, &[1, 1, 1, 0], 1, &[("w", "a+c"), ("x", "a"), ("y=z", "a+b")]),
            e("(0,1,1,1)", Any, &[0, 1, 1, 1], 1, &[("w=x", "b+d"), ("y", "b+c+d"), ("z", "c")]),
            e("(1,0,2,0)", Any, &[1, 0, 2, 0], 1, &[("w", "c1"), ("x", "a"), ("y=z", "a+c2")]),
            e("(0,2,0,1)", Any, &[0, 2, 0, 1], 1, &[("w=x", "b1+d"), ("y=z", "b2+d")]),
            e(
                "(1,1,1/2,1)",
                Any,
                &[2, 2, 1, 2],
                2,
                &[
                    ("w", "(b2+d1, c+d2)"),
                    ("x", "(a1+d1, a2+b2+c+d2)"),
                    ("y", "(a1+b1+d1, a2+d2)"),
                    ("z", "(a1+b1, a2+c)"),
                ],
            ),
            e(
                "(1,1/2,1,1)",
                Any,
                &[2, 1, 2, 2],
                2,
                &[
                    ("w", "(c1+d1, b+d2)"),
                    ("x", "(a1+c1+d1, a2+d2)"),
                    ("y", "(a1+d1, a2+b+c2+d2)"),
                    ("z", "(a1+c2, a2+b)"),
                ],
            ),
        ],
    }
}

/// Looks up a catalog code by label.
pub fn builtin_code(id: NetworkId, label: &str) -> Option<CatalogCode> {
    builtin_codes(id).into_iter().find(|c| c.label == label)
}

#[derive(Debug, Clone, Serialize)]
pub struct AchievedCode {
    pub label: String,
    pub rate_vector: RateVector,
    pub valid: bool,
    pub routing: bool,
    pub in_region: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexCoverage {
    pub vertex: String,
    /// Code that reaches the vertex after silencing the messages that are
    /// zero there.
    pub code: Option<String>,
    pub valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AchieveReport {
    pub network: NetworkId,
    pub class: RegionClass,
    pub field: u32,
    pub codes: Vec<AchievedCode>,
    pub vertices: Vec<VertexCoverage>,
    /// Inner regions must have every vertex reached by some code.
    pub coverage_required: bool,
    pub ok: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum AchieveError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// Field and code filter used to exhibit a class.
fn class_policy(id: NetworkId, class: RegionClass) -> (u32, fn(&CatalogCode) -> bool) {
    use NetworkId::*;
    use RegionClass::*;
    fn all(_: &CatalogCode) -> bool {
        true
    }
    fn even(c: &CatalogCode) -> bool {
        c.claim != FieldClaim::Odd
    }
    fn odd(c: &CatalogCode) -> bool {
        c.claim != FieldClaim::Even
    }
    match (id, class) {
        (Fano, LinearOdd) => (3, odd),
        (Fano, _) => (2, even),
        (NonFano, LinearEven) => (2, even),
        (NonFano, _) => (3, odd),
        _ => (2, all),
    }
}

/// Verifies every bundled code for a class, checks its rate vector against
/// the cataloged region, and tries to reach each vertex of the region by
/// silencing messages of some code.
pub fn achieve(id: NetworkId, class: RegionClass) -> Result<AchieveReport, AchieveError> {
    let region = builtin_region(id, class)?;
    let class = canonical_class(id, class).unwrap_or(class);
    let (p, keep) = class_policy(id, class);
    let field = PrimeField::new(p).map_err(CodeError::from)?;
    let net = builtin_network(id);
    let routing_only = class == RegionClass::Routing;
    let mut built = Vec::new();
    let mut codes = Vec::new();
    for cc in builtin_codes(id).into_iter().filter(keep) {
        let code = cc.build(field)?;
        let routing = code_is_routing(&code);
        if routing_only && !routing {
            continue;
        }
        let rv = code.rates.rate_vector();
        let valid = verify_solution(&net, &code)?.valid;
        let in_region = region.hrep.contains(&rv.point())?;
        codes.push(AchievedCode {
            label: cc.label.clone(),
            rate_vector: rv,
            valid,
            routing,
            in_region,
        });
        built.push((cc.label, code));
    }

    let coverage_required = !matches!(class, RegionClass::ShannonOuter | RegionClass::ZyOuter);
    let mut vertices = Vec::new();
    for v in enumerate_vertices(&region.hrep)?.vertices {
        let found = built.iter().find(|(_, c)| {
            let r = c.rates.rate_vector().point();
            v.iter().zip(&r).all(|(vi, ri)| vi == ri || num::Zero::is_zero(vi))
        });
        let mut cov = VertexCoverage {
            vertex: format_point(&v),
            code: None,
            valid: false,
        };
        if let Some((label, c)) = found {
            let silence: Vec<&str> = net
                .messages
                .iter()
                .zip(&v)
                .filter(|(_, vi)| num::Zero::is_zero(*vi))
                .map(|(m, _)| m.as_str())
                .collect();
            let z = c.zero_messages(&net, &silence)?;
            cov.code = Some(label.clone());
            cov.valid = verify_solution(&net, &z)?.valid && z.rates.rate_vector().point() == v;
        }
        vertices.push(cov);
    }
    let ok = !codes.is_empty()
        && codes.iter().all(|c| c.valid && c.in_region && (!routing_only || c.routing))
        && (!coverage_required || vertices.iter().all(|v| v.valid));
    Ok(AchieveReport {
        network: id,
        class,
        field: p,
        codes,
        vertices,
        coverage_required,
        ok,
    })
}

fn code_is_routing(c: &LinearCode) -> bool {
    super::Code::is_routing(c)
}

/// The time-shared butterfly code from the three vertex codes
/// (1,0,1,1), (1,1,0,1) and (0,1,1,0).
pub fn butterfly_time_shared(field: PrimeField) -> Result<LinearCode, CodeError> {
    let net = builtin_network(NetworkId::GButterfly);
    let parts = ["(1,0,1,1)", "(1,1,0,1)", "(0,1,1,0)"]
        .iter()
        .map(|l| builtin_code(NetworkId::GButterfly, l).expect("catalog label").build(field))
        .collect::<Result<Vec<_>, _>>()?;
    concatenate_codes(&net, &parts)
}
