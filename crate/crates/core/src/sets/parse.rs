//! Recursive-descent parser for the set-expression grammar.
//!
//! ```text
//! setexpr  := term ( "u" term )*
//! term     := "{" rat ("," rat)* "}"
//!           | lbr rat "," (rat | "inf") rbr        # lbr in { "[", "(" }
//!           | "omega" "(" nat ")"
//!           | "sumclosed" "(" rat ("," rat)* ";" (rat | "inf") ")"
//!           | "rationals" lbr rat "," (rat | "inf") rbr
//! rat      := int | int "/" posint
//! ```
//!
//! Whitespace is insignificant. `inf` is legal only as a right endpoint
//! closed by `)`. The resulting set must contain 0.

use super::{DistanceSet, Interval, SetError};
use crate::rat::{Rat, XRat};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Slash,
    Int(BigInt),
    Ident(String),
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, SetError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'{' => {
                toks.push((start, Tok::LBrace));
                i += 1;
            }
            b'}' => {
                toks.push((start, Tok::RBrace));
                i += 1;
            }
            b'[' => {
                toks.push((start, Tok::LBracket));
                i += 1;
            }
            b']' => {
                toks.push((start, Tok::RBracket));
                i += 1;
            }
            b'(' => {
                toks.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((start, Tok::RParen));
                i += 1;
            }
            b',' => {
                toks.push((start, Tok::Comma));
                i += 1;
            }
            b';' => {
                toks.push((start, Tok::Semi));
                i += 1;
            }
            b'/' => {
                toks.push((start, Tok::Slash));
                i += 1;
            }
            b'-' | b'0'..=b'9' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s = &text[start..i];
                let n = BigInt::from_str(s).map_err(|_| SetError::Syntax {
                    position: start,
                    message: format!("bad integer `{s}`"),
                })?;
                toks.push((start, Tok::Int(n)));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_lowercase())));
            }
            _ => {
                return Err(SetError::Syntax {
                    position: start,
                    message: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: text.len(),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SetError> {
        let position = self.here();
        match self.next() {
            Some(t) if t == tok => Ok(()),
            _ => Err(SetError::Syntax {
                position,
                message: format!("expected {what}"),
            }),
        }
    }

    fn rat(&mut self) -> Result<Rat, SetError> {
        let position = self.here();
        let p = match self.next() {
            Some(Tok::Int(n)) => n,
            _ => {
                return Err(SetError::Syntax {
                    position,
                    message: "expected a rational".to_string(),
                })
            }
        };
        if matches!(self.peek(), Some(Tok::Slash)) {
            self.next();
            let qpos = self.here();
            match self.next() {
                Some(Tok::Int(q)) if q > BigInt::from(0) => Ok(Rat::from_bigint_ratio(p, q)),
                _ => Err(SetError::Syntax {
                    position: qpos,
                    message: "expected a positive denominator".to_string(),
                }),
            }
        } else {
            Ok(Rat::from_bigint_ratio(p, BigInt::from(1)))
        }
    }

    /// `rat` or the keyword `inf`.
    fn rat_or_inf(&mut self) -> Result<XRat, SetError> {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "inf") {
            self.next();
            Ok(XRat::Infinity)
        } else {
            Ok(XRat::Finite(self.rat()?))
        }
    }
}

enum Piece {
    Points(Vec<Rat>),
    Ivals(Vec<Interval>),
    QIvals(Vec<Interval>),
    Omega(u64),
    Sum {
        gens: Vec<Rat>,
        cap: XRat,
        cap_included: bool,
    },
}

fn nonneg(v: &Rat, position: usize) -> Result<(), SetError> {
    if v.is_negative() {
        Err(SetError::Syntax {
            position,
            message: "negative values are not allowed in distance sets".to_string(),
        })
    } else {
        Ok(())
    }
}

fn parse_interval_body(lx: &mut Lexer, lo_closed: bool) -> Result<Interval, SetError> {
    let lo_pos = lx.here();
    let lo = lx.rat()?;
    nonneg(&lo, lo_pos)?;
    lx.expect(Tok::Comma, "`,`")?;
    let hi = lx.rat_or_inf()?;
    let close_pos = lx.here();
    let hi_closed = match lx.next() {
        Some(Tok::RBracket) => true,
        Some(Tok::RParen) => false,
        _ => {
            return Err(SetError::Syntax {
                position: close_pos,
                message: "expected `]` or `)`".to_string(),
            })
        }
    };
    if hi.is_infinite() && hi_closed {
        return Err(SetError::Syntax {
            position: close_pos,
            message: "`inf` must be closed by `)`".to_string(),
        });
    }
    Interval::new(lo, lo_closed, hi, hi_closed)
}

fn parse_term(lx: &mut Lexer) -> Result<Piece, SetError> {
    let position = lx.here();
    match lx.next() {
        Some(Tok::LBrace) => {
            let mut vals = Vec::new();
            loop {
                let vpos = lx.here();
                let v = lx.rat()?;
                nonneg(&v, vpos)?;
                vals.push(v);
                match lx.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBrace) => break,
                    _ => {
                        return Err(SetError::Syntax {
                            position: lx.here(),
                            message: "expected `,` or `}`".to_string(),
                        })
                    }
                }
            }
            Ok(Piece::Points(vals))
        }
        Some(Tok::LBracket) => Ok(Piece::Ivals(vec![parse_interval_body(lx, true)?])),
        Some(Tok::LParen) => Ok(Piece::Ivals(vec![parse_interval_body(lx, false)?])),
        Some(Tok::Ident(w)) if w == "omega" => {
            lx.expect(Tok::LParen, "`(`")?;
            let npos = lx.here();
            let n = match lx.next() {
                Some(Tok::Int(n)) if n >= BigInt::from(0) => {
                    n.to_u64().ok_or(SetError::Syntax {
                        position: npos,
                        message: "segment length too large".to_string(),
                    })?
                }
                _ => {
                    return Err(SetError::Syntax {
                        position: npos,
                        message: "expected a natural number".to_string(),
                    })
                }
            };
            lx.expect(Tok::RParen, "`)`")?;
            if n == 0 {
                return Err(SetError::ZeroMissing);
            }
            Ok(Piece::Omega(n))
        }
        Some(Tok::Ident(w)) if w == "sumclosed" => {
            lx.expect(Tok::LParen, "`(`")?;
            let mut gens = Vec::new();
            loop {
                let gpos = lx.here();
                let g = lx.rat()?;
                if !g.is_positive() {
                    return Err(SetError::Syntax {
                        position: gpos,
                        message: "generators must be positive".to_string(),
                    });
                }
                gens.push(g);
                match lx.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::Semi) => break,
                    _ => {
                        return Err(SetError::Syntax {
                            position: lx.here(),
                            message: "expected `,` or `;`".to_string(),
                        })
                    }
                }
            }
            let cap = lx.rat_or_inf()?;
            if let XRat::Finite(c) = &cap {
                nonneg(c, lx.here())?;
            }
            lx.expect(Tok::RParen, "`)`")?;
            Ok(Piece::Sum {
                gens,
                cap,
                cap_included: true,
            })
        }
        Some(Tok::Ident(w)) if w == "rationals" => {
            let bpos = lx.here();
            let lo_closed = match lx.next() {
                Some(Tok::LBracket) => true,
                Some(Tok::LParen) => false,
                _ => {
                    return Err(SetError::Syntax {
                        position: bpos,
                        message: "expected `[` or `(` after `rationals`".to_string(),
                    })
                }
            };
            Ok(Piece::QIvals(vec![parse_interval_body(lx, lo_closed)?]))
        }
        _ => Err(SetError::Syntax {
            position,
            message: "expected a set term".to_string(),
        }),
    }
}

const UNION_ENUM_LIMIT: usize = 100_000;

pub(super) fn parse_setexpr(text: &str) -> Result<DistanceSet, SetError> {
    let mut lx = lex(text)?;
    let mut pieces = vec![parse_term(&mut lx)?];
    loop {
        match lx.peek() {
            Some(Tok::Ident(w)) if w == "u" => {
                lx.next();
                pieces.push(parse_term(&mut lx)?);
            }
            None => break,
            _ => {
                return Err(SetError::Syntax {
                    position: lx.here(),
                    message: "expected `u` or end of input".to_string(),
                })
            }
        }
    }
    combine(pieces)
}

fn combine(pieces: Vec<Piece>) -> Result<DistanceSet, SetError> {
    if pieces.len() == 1 {
        return match pieces.into_iter().next().unwrap() {
            Piece::Points(vals) => DistanceSet::finite(vals),
            Piece::Ivals(comps) => DistanceSet::intervals(comps),
            Piece::QIvals(comps) => DistanceSet::rationals(comps),
            Piece::Omega(n) => DistanceSet::omega(n),
            Piece::Sum {
                gens,
                cap,
                cap_included,
            } => DistanceSet::sum_closure(gens, cap, cap_included),
        };
    }
    // Multi-term unions: flatten everything into points and interval
    // components, then decide between the real and the rational union.
    let mut points: Vec<Rat> = Vec::new();
    let mut ivals: Vec<Interval> = Vec::new();
    let mut qivals: Vec<Interval> = Vec::new();
    for piece in pieces {
        match piece {
            Piece::Points(vals) => points.extend(vals),
            Piece::Ivals(comps) => {
                for c in comps {
                    if c.is_point() {
                        points.push(c.lo().clone());
                    } else {
                        ivals.push(c);
                    }
                }
            }
            Piece::QIvals(comps) => {
                for c in comps {
                    if c.is_point() {
                        points.push(c.lo().clone());
                    } else {
                        qivals.push(c);
                    }
                }
            }
            Piece::Omega(n) => {
                if n as usize > UNION_ENUM_LIMIT {
                    return Err(SetError::UnsupportedUnion(
                        "omega segment too long to combine with other terms".to_string(),
                    ));
                }
                points.extend((0..n).map(|k| crate::rat::int(k as i64)));
            }
            Piece::Sum {
                gens,
                cap,
                cap_included,
            } => {
                if cap.is_infinite() {
                    return Err(SetError::UnsupportedUnion(
                        "an unbounded sum closure cannot be combined with other terms".to_string(),
                    ));
                }
                let s = DistanceSet::sum_closure(gens, cap, cap_included)?;
                let all = s.enumerate_all();
                if all.len() > UNION_ENUM_LIMIT {
                    return Err(SetError::UnsupportedUnion(
                        "sum closure too large to combine with other terms".to_string(),
                    ));
                }
                points.extend(all);
            }
        }
    }
    if !qivals.is_empty() {
        if !ivals.is_empty() {
            return Err(SetError::UnsupportedUnion(
                "mixing real intervals with rational-point intervals is not representable"
                    .to_string(),
            ));
        }
        qivals.extend(points.into_iter().map(Interval::point));
        DistanceSet::rationals(qivals)
    } else if !ivals.is_empty() {
        ivals.extend(points.into_iter().map(Interval::point));
        DistanceSet::intervals(ivals)
    } else {
        DistanceSet::finite(points)
    }
}
