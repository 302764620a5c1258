//! JSON code files.
//!
//! ```text
//! {
//!   "kind": "linear",
//!   "network": "fano",
//!   "field": {"modulus": 2},
//!   "message_dims": {"a": 1, "b": 1, "c": 1},
//!   "edge_dim": 1,
//!   "edges": {"w": {"inputs": ["a", "b"], "matrix": [[1, 1]]}, ...},
//!   "decoders": {"n12:c": {"inputs": ["a", "x_n12"], "matrix": [[1, 1]]}}
//! }
//! ```
//!
//! Table codes use `"kind": "table"`, an `"alphabet"` size and a `"table"`
//! object per function mapping input digit strings to output digit strings
//! (one base-36 digit per symbol). An edge left out of the file is a copy
//! if its tail is an unlabeled relay and zero otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_structure, input_tuples, CodeError, LinearCode, RateSpec, Table, TableCode};
use crate::ff::{Characteristic, Matrix, PrimeField};
use crate::netmodel::{builtin_network, Network, NetworkId};

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    characteristic: Option<Characteristic>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCode {
    kind: String,
    network: NetworkId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<u32>,
    message_dims: BTreeMap<String, usize>,
    edge_dim: usize,
    edges: BTreeMap<String, RawFunction>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    decoders: BTreeMap<String, RawFunction>,
}

/// A code read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeFile {
    Linear(LinearCode),
    Table(TableCode),
}

impl CodeFile {
    pub fn network(&self) -> NetworkId {
        match self {
            CodeFile::Linear(c) => c.network,
            CodeFile::Table(c) => c.network,
        }
    }

    pub fn to_json(&self) -> Result<String, CodeError> {
        match self {
            CodeFile::Linear(c) => save_linear(c),
            CodeFile::Table(c) => save_table(c),
        }
    }
}

fn bad(msg: impl Into<String>) -> CodeError {
    CodeError::File(msg.into())
}

fn input_names(net: &Network, node: &str) -> Vec<String> {
    net.local_inputs(node).iter().map(|i| i.name().to_string()).collect()
}

fn is_relay_copy(net: &Network, edge: &str) -> bool {
    let e = net.edge(edge).expect("known edge");
    !net.named_edges.contains_key(edge) && net.local_messages(&e.tail).is_empty() && net.in_edges(&e.tail).len() == 1
}

fn split_decoder_key(key: &str) -> Result<(String, String), CodeError> {
    key.split_once(':')
        .map(|(r, m)| (r.to_string(), m.to_string()))
        .ok_or_else(|| bad(format!("decoder key `{key}` must be receiver:message")))
}

fn check_inputs(net: &Network, node: &str, what: &str, given: &[String]) -> Result<(), CodeError> {
    let expected = input_names(net, node);
    if given != expected.as_slice() {
        return Err(bad(format!(
            "{what}: inputs {given:?} do not match the local inputs {expected:?} at {node}"
        )));
    }
    Ok(())
}

pub fn load_code(text: &str) -> Result<CodeFile, CodeError> {
    let raw: RawCode = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let net = builtin_network(raw.network);
    if raw.edge_dim == 0 {
        return Err(CodeError::ZeroEdgeDim);
    }
    for m in &net.messages {
        if !raw.message_dims.contains_key(m) {
            return Err(bad(format!("message_dims has no entry for {m}")));
        }
    }
    if let Some(m) = raw.message_dims.keys().find(|m| net.message_index(m).is_none()) {
        return Err(CodeError::UnknownMessage(m.clone()));
    }
    let rates = RateSpec {
        message_dims: raw.message_dims.clone(),
        n: raw.edge_dim,
    };
    for id in raw.edges.keys() {
        if net.edge(id).is_none() {
            return Err(CodeError::UnknownEdge(id.clone()));
        }
    }
    let mut decoder_keys = Vec::new();
    for key in raw.decoders.keys() {
        let (r, m) = split_decoder_key(key)?;
        if !net.demands.contains(&(r.clone(), m.clone())) {
            return Err(CodeError::UnknownDemand(r, m));
        }
        decoder_keys.push((key.clone(), r, m));
    }
    let code = match raw.kind.as_str() {
        "linear" => {
            if raw.alphabet.is_some() {
                return Err(bad("linear codes take a field, not an alphabet"));
            }
            let spec = raw.field.as_ref().ok_or_else(|| bad("linear code needs a field"))?;
            let field = match (spec.modulus, spec.characteristic) {
                (Some(p), None) => PrimeField::new(p)?,
                (None, Some(Characteristic::Even)) => PrimeField::new(2)?,
                (None, Some(Characteristic::Odd)) => PrimeField::new(3)?,
                _ => return Err(bad("field needs exactly one of modulus or characteristic")),
            };
            let matrix = |what: &str, node: &str, f: &RawFunction, rows: usize| -> Result<Matrix, CodeError> {
                check_inputs(&net, node, what, &f.inputs)?;
                if f.table.is_some() {
                    return Err(bad(format!("{what}: linear code functions use `matrix`")));
                }
                let m = f.matrix.as_ref().ok_or_else(|| bad(format!("{what}: missing matrix")))?;
                let cols = rates.local_width(&net, node);
                if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                    return Err(CodeError::BadShape {
                        what: what.to_string(),
                        rows,
                        cols,
                        got_rows: m.len(),
                        got_cols: m.first().map_or(cols, Vec::len),
                    });
                }
                Ok(Matrix::from_rows(field, cols, m)?)
            };
            let mut edges = BTreeMap::new();
            for e in &net.edges {
                let m = match raw.edges.get(&e.id) {
                    Some(f) => matrix(&format!("edge {}", e.id), &e.tail, f, raw.edge_dim)?,
                    None if is_relay_copy(&net, &e.id) => Matrix::identity(field, raw.edge_dim),
                    None => Matrix::zeros(field, raw.edge_dim, rates.local_width(&net, &e.tail)),
                };
                edges.insert(e.id.clone(), m);
            }
            let mut decoders = BTreeMap::new();
            for (key, r, m) in decoder_keys {
                let d = matrix(&format!("decoder {key}"), &r, &raw.decoders[&key], rates.k(&m))?;
                decoders.insert((r, m), d);
            }
            CodeFile::Linear(LinearCode {
                network: raw.network,
                field,
                rates,
                edges,
                decoders,
            })
        }
        "table" => {
            if raw.field.is_some() {
                return Err(bad("table codes take an alphabet, not a field"));
            }
            let q = raw.alphabet.ok_or_else(|| bad("table code needs an alphabet"))?;
            if !(2..=36).contains(&q) {
                return Err(bad(format!("alphabet size {q} outside 2..=36")));
            }
            let table = |what: &str, node: &str, f: &RawFunction, out: usize| -> Result<Table, CodeError> {
                check_inputs(&net, node, what, &f.inputs)?;
                if f.matrix.is_some() {
                    return Err(bad(format!("{what}: table code functions use `table`")));
                }
                let t = f.table.as_ref().ok_or_else(|| bad(format!("{what}: missing table")))?;
                parse_table(q, rates.local_width(&net, node), out, t, what)
            };
            let mut edges = BTreeMap::new();
            for e in &net.edges {
                let width = rates.local_width(&net, &e.tail);
                let t = match raw.edges.get(&e.id) {
                    Some(f) => table(&format!("edge {}", e.id), &e.tail, f, raw.edge_dim)?,
                    None => {
                        let copy = is_relay_copy(&net, &e.id);
                        Table {
                            input_width: width,
                            output_width: raw.edge_dim,
                            entries: input_tuples(q, width)
                                .into_iter()
                                .map(|x| if copy { x } else { vec![0; raw.edge_dim] })
                                .collect(),
                        }
                    }
                };
                edges.insert(e.id.clone(), t);
            }
            let mut decoders = BTreeMap::new();
            for (key, r, m) in decoder_keys {
                let t = table(&format!("decoder {key}"), &r, &raw.decoders[&key], rates.k(&m))?;
                decoders.insert((r, m), t);
            }
            CodeFile::Table(TableCode {
                network: raw.network,
                alphabet: q,
                rates,
                edges,
                decoders,
            })
        }
        other => return Err(bad(format!("unknown kind `{other}`"))),
    };
    match &code {
        CodeFile::Linear(c) => check_structure(&net, c)?,
        CodeFile::Table(c) => check_structure(&net, c)?,
    }
    Ok(code)
}

fn digits_to_symbols(q: u32, s: &str, what: &str) -> Result<Vec<u32>, CodeError> {
    s.chars()
        .map(|ch| {
            ch.to_digit(36)
                .filter(|&d| d < q)
                .ok_or_else(|| bad(format!("{what}: `{s}` is not a base-{q} digit string")))
        })
        .collect()
}

fn symbols_to_digits(v: &[u32]) -> String {
    v.iter().map(|&d| DIGITS[d as usize] as char).collect()
}

fn parse_table(
    q: u32,
    width: usize,
    out: usize,
    raw: &BTreeMap<String, String>,
    what: &str,
) -> Result<Table, CodeError> {
    let size = (q as u128).pow(width as u32);
    if size > super::DEFAULT_GUARD as u128 {
        return Err(CodeError::GuardExceeded {
            size,
            guard: super::DEFAULT_GUARD,
        });
    }
    let mut entries: Vec<Option<Vec<u32>>> = vec![None; size as usize];
    for (k, v) in raw {
        let input = digits_to_symbols(q, k, what)?;
        if input.len() != width {
            return Err(bad(format!("{what}: key `{k}` should have {width} digits")));
        }
        let output = digits_to_symbols(q, v, what)?;
        if output.len() != out {
            return Err(bad(format!("{what}: value `{v}` should have {out} digits")));
        }
        entries[Table::index(q, &input)] = Some(output);
    }
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            e.ok_or_else(|| CodeError::MissingTableEntry {
                function: what.to_string(),
                key: symbols_to_digits(&input_tuples(q, width)[i]),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        input_width: width,
        output_width: out,
        entries,
    })
}

fn to_json(raw: &RawCode) -> Result<String, CodeError> {
    let mut s = serde_json::to_string_pretty(raw).map_err(|e| bad(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn save_linear(code: &LinearCode) -> Result<String, CodeError> {
    let net = builtin_network(code.network);
    check_structure(&net, code)?;
    let func = |node: &str, m: &Matrix| RawFunction {
        inputs: input_names(&net, node),
        matrix: Some(m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect()),
        table: None,
    };
    let raw = RawCode {
        kind: "linear".into(),
        network: code.network,
        field: Some(FieldSpec {
            modulus: Some(code.field.modulus()),
            characteristic: None,
        }),
        alphabet: None,
        message_dims: code.rates.message_dims.clone(),
        edge_dim: code.rates.n,
        edges: net
            .edges
            .iter()
            .map(|e| (e.id.clone(), func(&e.tail, &code.edges[&e.id])))
            .collect(),
        decoders: code
            .decoders
            .iter()
            .map(|((r, m), d)| (format!("{r}:{m}"), func(r, d)))
            .collect(),
    };
    to_json(&raw)
}

pub fn save_table(code: &TableCode) -> Result<String, CodeError> {
    let net = builtin_network(code.network);
    check_structure(&net, code)?;
    let q = code.alphabet;
    let func = |node: &str, t: &Table| RawFunction {
        inputs: input_names(&net, node),
        matrix: None,
        table: Some(
            input_tuples(q, t.input_width)
                .iter()
                .zip(&t.entries)
                .map(|(x, y)| (symbols_to_digits(x), symbols_to_digits(y)))
                .collect(),
        ),
    };
    let raw = RawCode {
        kind: "table".into(),
        network: code.network,
        field: None,
        alphabet: Some(q),
        message_dims: code.rates.message_dims.clone(),
        edge_dim: code.rates.n,
        edges: net
            .edges
            .iter()
            .map(|e| (e.id.clone(), func(&e.tail, &code.edges[&e.id])))
            .collect(),
        decoders: code
            .decoders
            .iter()
            .map(|((r, m), d)| (format!("{r}:{m}"), func(r, d)))
            .collect(),
    };
    to_json(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin_code, verify_solution_exhaustive};

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn linear_round_trip() {
        let c = builtin_code(NetworkId::Fano, "(4/5,4/5,4/5)").unwrap().build(gf(3)).unwrap();
        let text = save_linear(&c).unwrap();
        let back = load_code(&text).unwrap();
        assert_eq!(back, CodeFile::Linear(c));
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn table_round_trip() {
        let net = builtin_network(NetworkId::GButterfly);
        let c = builtin_code(NetworkId::GButterfly, "(0,1,1,0)").unwrap().build(gf(3)).unwrap();
        let t = c.to_table(&net).unwrap();
        let text = save_table(&t).unwrap();
        let back = load_code(&text).unwrap();
        assert_eq!(back, CodeFile::Table(t.clone()));
        assert!(verify_solution_exhaustive(&net, &t).unwrap().valid);
    }

    #[test]
    fn characteristic_and_defaults() {
        let text = r#"{
            "kind": "linear", "network": "fano", "field": {"characteristic": "even"},
            "message_dims": {"a": 1, "b": 1, "c": 1}, "edge_dim": 1,
            "edges": {
                "w": {"inputs": ["a", "b"], "matrix": [[1, 1]]},
                "y": {"inputs": ["b", "c"], "matrix": [[1, 1]]},
                "x": {"inputs": ["w_X", "y_X"], "matrix": [[1, 1]]},
                "z": {"inputs": ["c", "w_Z"], "matrix": [[1, 1]]}
            }
        }"#;
        let CodeFile::Linear(c) = load_code(text).unwrap() else { panic!() };
        assert_eq!(c.field.modulus(), 2);
        assert_eq!(c.edges["x_n12"].to_rows(), vec![vec![1]]);
        let net = builtin_network(NetworkId::Fano);
        assert!(crate::codes::verify_solution(&net, &c).unwrap().valid);
    }

    #[test]
    fn malformed_files() {
        let c = builtin_code(NetworkId::Fano, "(1,1,1)").unwrap().build(gf(2)).unwrap();
        let text = save_linear(&c).unwrap();
        assert!(load_code("{").is_err());
        assert!(load_code(&text.replace("\"fano\"", "\"petersen\"")).is_err());
        assert!(load_code(&text.replace("\"edge_dim\": 1", "\"edge_dim\": 2")).is_err());
        assert!(load_code(&text.replace("\"w_X\"", "\"w_Q\"")).is_err());
        let t = c.to_table(&builtin_network(NetworkId::Fano)).unwrap();
        let tt = save_table(&t).unwrap();
        let missing = tt.replacen(",\n        \"11\": \"0\"", "", 1);
        assert_ne!(missing, tt);
        assert!(matches!(load_code(&missing), Err(CodeError::MissingTableEntry { .. })));
    }
}
