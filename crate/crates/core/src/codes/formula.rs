//! Global edge formulas such as `(a1+b1, a2-c2, a3)` or `b+c`.
//!
//! A symbol is a message id followed by an optional 1-based coordinate
//! (`a` alone means `a1`). Terms may carry an integer coefficient, written
//! `2a1` or `2*a1`. `0` denotes the zero symbol.

use super::CodeError;
use crate::ff::{Matrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub message: String,
    pub coord: usize,
}

/// One linear combination per output coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub coords: Vec<Vec<Term>>,
}

fn err(text: &str, msg: &str) -> CodeError {
    CodeError::Formula(format!("`{text}`: {msg}"))
}

fn parse_combination(text: &str, full: &str) -> Result<Vec<Term>, CodeError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err(full, "empty coordinate"));
    }
    if s == "0" {
        return Ok(Vec::new());
    }
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut terms = Vec::new();
    while i < chars.len() {
        let mut sign = 1;
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -1;
            }
            i += 1;
        } else if !terms.is_empty() {
            return Err(err(full, "expected `+` or `-` between terms"));
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let coeff: i64 = if i > start {
            chars[start..i].iter().collect::<String>().parse().map_err(|_| err(full, "bad coefficient"))?
        } else {
            1
        };
        if i < chars.len() && chars[i] == '*' {
            i += 1;
        }
        let name_start = i;
        while i < chars.len() && chars[i].is_ascii_alphabetic() {
            i += 1;
        }
        if i == name_start {
            return Err(err(full, "expected a message name"));
        }
        let message: String = chars[name_start..i].iter().collect();
        let idx_start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let coord = if i > idx_start {
            chars[idx_start..i].iter().collect::<String>().parse().map_err(|_| err(full, "bad index"))?
        } else {
            1
        };
        if coord == 0 {
            return Err(err(full, "coordinates are numbered from 1"));
        }
        terms.push(Term {
            coeff: sign * coeff,
            message,
            coord,
        });
    }
    Ok(terms)
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula, CodeError> {
        let t = text.trim();
        let body = match t.strip_prefix('(') {
            Some(rest) => rest
                .strip_suffix(')')
                .ok_or_else(|| err(text, "unbalanced parentheses"))?,
            None => t,
        };
        let coords = body
            .split(',')
            .map(|c| parse_combination(c, text))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Formula { coords })
    }

    pub fn width(&self) -> usize {
        self.coords.len()
    }

    /// Matrix over the global message vector; `layout` gives each message's
    /// offset and dimension.
    pub fn to_matrix(
        &self,
        field: PrimeField,
        layout: &[(String, usize, usize)],
        total: usize,
    ) -> Result<Matrix, CodeError> {
        let mut m = Matrix::zeros(field, self.coords.len(), total);
        for (r, terms) in self.coords.iter().enumerate() {
            for t in terms {
                let (_, off, k) = layout
                    .iter()
                    .find(|(name, _, _)| *name == t.message)
                    .ok_or_else(|| CodeError::UnknownMessage(t.message.clone()))?;
                if t.coord > *k {
                    return Err(CodeError::Formula(format!(
                        "{}{} exceeds the message dimension {k}",
                        t.message, t.coord
                    )));
                }
                let c = off + t.coord - 1;
                let v = field.add(m.get(r, c), field.reduce(t.coeff));
                m.set(r, c, v);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> Vec<(String, usize, usize)> {
        vec![("a".into(), 0, 2), ("b".into(), 2, 1), ("c".into(), 3, 2)]
    }

    #[test]
    fn parses_tuples_and_scalars() {
        let f = Formula::parse("(a1+b, a2-c2, 0)").unwrap();
        assert_eq!(f.width(), 3);
        assert_eq!(f.coords[1][1], Term { coeff: -1, message: "c".into(), coord: 2 });
        assert!(f.coords[2].is_empty());
        let g = Formula::parse("b + 2*c2").unwrap();
        assert_eq!(g.width(), 1);
        assert_eq!(g.coords[0][1].coeff, 2);
    }

    #[test]
    fn matrix_over_gf3() {
        let gf3 = PrimeField::new(3).unwrap();
        let m = Formula::parse("(a1+b, a2-c2)").unwrap().to_matrix(gf3, &layout(), 5).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1, 0, 1, 0, 0], vec![0, 1, 0, 0, 2]]);
    }

    #[test]
    fn rejects_bad_input() {
        let gf2 = PrimeField::new(2).unwrap();
        assert!(Formula::parse("(a1+").is_err());
        assert!(Formula::parse("a1 b1").is_err());
        assert!(Formula::parse("a0").is_err());
        assert!(Formula::parse("b2").unwrap().to_matrix(gf2, &layout(), 5).is_err());
        assert!(Formula::parse("z").unwrap().to_matrix(gf2, &layout(), 5).is_err());
    }
}
