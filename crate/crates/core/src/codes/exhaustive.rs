//! Brute-force verification over every message assignment.
//!
//! Assignments are numbered in mixed-radix order: the message vector
//! (messages in network order, coordinates in order) read as a base-|A|
//! number with the first symbol most significant. Demands with a decoder
//! are checked directly; demands without one pass iff the demanded message
//! is a function of the receiver's inputs.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{
    check_structure, split_assignment, Code, CodeError, DemandStatus, Function, VerificationReport, Witness,
};
use crate::netmodel::{LocalInput, Network};
use crate::parallel::pool;

pub const DEFAULT_GUARD: u64 = 1 << 20;

const BLOCK: usize = 4096;

struct Step<'a> {
    f: Function<'a>,
    inputs: Vec<(usize, usize)>,
    out: usize,
}

struct DemandPlan<'a> {
    receiver: String,
    message: String,
    inputs: Vec<(usize, usize)>,
    target: (usize, usize),
    decoder: Option<Function<'a>>,
}

struct Plan<'a> {
    q: u32,
    k: usize,
    buf_len: usize,
    steps: Vec<Step<'a>>,
    demands: Vec<DemandPlan<'a>>,
}

fn gather(buf: &[u32], slices: &[(usize, usize)], out: &mut Vec<u32>) {
    out.clear();
    for &(off, w) in slices {
        out.extend_from_slice(&buf[off..off + w]);
    }
}

impl<'a> Plan<'a> {
    fn new<C: Code + ?Sized>(net: &Network, code: &'a C) -> Result<Self, CodeError> {
        let rates = code.rates();
        let layout = rates.layout(net);
        let k = rates.total();
        let mut edge_slot = HashMap::new();
        let mut buf_len = k;
        let slices = |node: &str, edge_slot: &HashMap<String, usize>| -> Vec<(usize, usize)> {
            net.local_inputs(node)
                .iter()
                .map(|i| match i {
                    LocalInput::Message(m) => {
                        let (_, off, km) = layout.iter().find(|(x, _, _)| x == m).expect("layout message");
                        (*off, *km)
                    }
                    LocalInput::Edge(e) => (edge_slot[e], rates.n),
                })
                .collect()
        };
        let mut steps = Vec::new();
        for e in net.edges_in_order()? {
            let f = code
                .edge_function(&e.id)
                .ok_or_else(|| CodeError::MissingEdge(e.id.clone()))?;
            let inputs = slices(&e.tail, &edge_slot);
            edge_slot.insert(e.id.clone(), buf_len);
            steps.push(Step {
                f,
                inputs,
                out: buf_len,
            });
            buf_len += rates.n;
        }
        let demands = net
            .demands
            .iter()
            .map(|(r, m)| {
                let (_, off, km) = layout.iter().find(|(x, _, _)| x == m).expect("layout message");
                DemandPlan {
                    receiver: r.clone(),
                    message: m.clone(),
                    inputs: slices(r, &edge_slot),
                    target: (*off, *km),
                    decoder: code.decoder_function(r, m),
                }
            })
            .collect();
        Ok(Plan {
            q: code.alphabet(),
            k,
            buf_len,
            steps,
            demands,
        })
    }

    fn load(&self, mut idx: u64, buf: &mut [u32]) {
        for slot in buf[..self.k].iter_mut().rev() {
            *slot = (idx % self.q as u64) as u32;
            idx /= self.q as u64;
        }
    }

    fn run(&self, idx: u64, buf: &mut [u32], scratch: &mut Vec<u32>) {
        self.load(idx, buf);
        for s in &self.steps {
            gather(buf, &s.inputs, scratch);
            let out = s.f.apply(scratch);
            buf[s.out..s.out + out.len()].copy_from_slice(&out);
        }
    }
}

/// Outcome of one block: first decoder failure per demand, and receiver
/// inputs and message values for the decoder-less demands.
struct BlockResult {
    first_fail: Vec<Option<u64>>,
    keys: Vec<Vec<u32>>,
    values: Vec<Vec<u32>>,
}

pub fn verify_solution_exhaustive<C: Code + ?Sized>(
    net: &Network,
    code: &C,
) -> Result<VerificationReport, CodeError> {
    verify_solution_exhaustive_with_guard(net, code, DEFAULT_GUARD)
}

/// Exhaustive verification with an explicit bound on the number of
/// assignments.
pub fn verify_solution_exhaustive_with_guard<C: Code + ?Sized>(
    net: &Network,
    code: &C,
    guard: u64,
) -> Result<VerificationReport, CodeError> {
    check_structure(net, code)?;
    let plan = Plan::new(net, code)?;
    let size = (plan.q as u128).checked_pow(plan.k as u32).unwrap_or(u128::MAX);
    if size > guard as u128 {
        return Err(CodeError::GuardExceeded { size, guard });
    }
    let total = size as u64;
    let blocks = total.div_ceil(BLOCK as u64);
    let nd = plan.demands.len();

    let results: Vec<BlockResult> = pool().install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut buf = vec![0u32; plan.buf_len];
                let mut scratch = Vec::new();
                let mut res = BlockResult {
                    first_fail: vec![None; nd],
                    keys: vec![Vec::new(); nd],
                    values: vec![Vec::new(); nd],
                };
                let lo = b * BLOCK as u64;
                let hi = (lo + BLOCK as u64).min(total);
                for idx in lo..hi {
                    plan.run(idx, &mut buf, &mut scratch);
                    for (d, dp) in plan.demands.iter().enumerate() {
                        let (off, km) = dp.target;
                        gather(&buf, &dp.inputs, &mut scratch);
                        match &dp.decoder {
                            Some(f) => {
                                if res.first_fail[d].is_none() && f.apply(&scratch) != buf[off..off + km] {
                                    res.first_fail[d] = Some(idx);
                                }
                            }
                            None => {
                                res.keys[d].extend_from_slice(&scratch);
                                res.values[d].extend_from_slice(&buf[off..off + km]);
                            }
                        }
                    }
                }
                res
            })
            .collect()
    });

    let layout = code.rates().layout(net);
    let assignment_of = |idx: u64| {
        let mut buf = vec![0u32; plan.k];
        plan.load(idx, &mut buf);
        split_assignment(&layout, &buf)
    };

    let mut demands = Vec::new();
    // (failing index, demand, earlier conflicting index)
    let mut failures: Vec<(u64, usize, Option<u64>)> = Vec::new();
    for (d, dp) in plan.demands.iter().enumerate() {
        let failure = match dp.decoder {
            Some(_) => results
                .iter()
                .find_map(|r| r.first_fail[d])
                .map(|j| (j, None)),
            None => {
                let width: usize = dp.inputs.iter().map(|s| s.1).sum();
                let km = dp.target.1;
                let keys: Vec<u32> = results.iter().flat_map(|r| r.keys[d].iter().copied()).collect();
                let values: Vec<u32> = results.iter().flat_map(|r| r.values[d].iter().copied()).collect();
                first_conflict(&keys, &values, width, km, total)
            }
        };
        let passed = failure.is_none();
        let detail = match (&failure, dp.decoder.is_some()) {
            (None, _) => None,
            (Some(_), true) => Some("decoder output differs from the message".to_string()),
            (Some(_), false) => Some(format!("{} is not determined by the inputs at {}", dp.message, dp.receiver)),
        };
        if let Some((j, i)) = failure {
            failures.push((j, d, i));
        }
        demands.push(DemandStatus {
            receiver: dp.receiver.clone(),
            message: dp.message.clone(),
            passed,
            decoder: None,
            detail,
        });
    }

    let witness = failures.iter().min_by_key(|(j, d, _)| (*j, *d)).map(|&(j, d, i)| {
        let dp = &plan.demands[d];
        let decoded = dp.decoder.as_ref().map(|f| {
            let mut buf = vec![0u32; plan.buf_len];
            let mut scratch = Vec::new();
            plan.run(j, &mut buf, &mut scratch);
            gather(&buf, &dp.inputs, &mut scratch);
            f.apply(&scratch)
        });
        Witness {
            receiver: dp.receiver.clone(),
            message: dp.message.clone(),
            assignment: assignment_of(j),
            other: i.map(assignment_of),
            decoded,
        }
    });

    Ok(VerificationReport {
        valid: failures.is_empty(),
        method: "exhaustive".into(),
        demands,
        witness,
        rate_vector: code.rates().rate_vector(),
        assignments_checked: Some(total),
    })
}

/// First index `j` whose receiver input was already seen at an earlier
/// index `i` with a different message value.
fn first_conflict(keys: &[u32], values: &[u32], width: usize, km: usize, total: u64) -> Option<(u64, Option<u64>)> {
    if km == 0 {
        return None;
    }
    let mut seen: HashMap<&[u32], u64> = HashMap::new();
    for j in 0..total as usize {
        let key = &keys[j * width..(j + 1) * width];
        let val = &values[j * km..(j + 1) * km];
        match seen.get(key) {
            Some(&i) => {
                let iu = i as usize;
                if &values[iu * km..(iu + 1) * km] != val {
                    return Some((j as u64, Some(i)));
                }
            }
            None => {
                seen.insert(key, j as u64);
            }
        }
    }
    None
}
