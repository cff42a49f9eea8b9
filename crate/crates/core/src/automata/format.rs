//! The `.wa` text format and DOT emission.
//!
//! Grammar (one directive per line, `#` comments, LF endings):
//!
//! ```text
//! wa v1
//! mode omega|finite
//! states N
//! init I
//! alphabet s1 s2 ...
//! trans SRC SYM DST WEIGHT
//! acceptance safety|cosafety|weak|buchi     (acceptors only)
//! accepting i j ...
//! partition b: i j ...                      (weak only)
//! order b1<b2
//! ```
//!
//! A file without an `acceptance` directive is a weighted automaton
//! (`mode omega`) or a finite-word DS automaton (`mode finite`); with one it
//! is an acceptor and the WEIGHT column is written as 0 and ignored.

use super::{
    Acceptance, OmegaAcceptor, StateId, WTransition, WeakPartition, WeightedOmegaAutomaton,
};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Symbols that can round-trip through `.wa` tokens.
pub trait WaSymbol: Sized {
    fn to_token(&self) -> String;
}

impl WaSymbol for String {
    fn to_token(&self) -> String {
        self.clone()
    }
}

impl WaSymbol for i64 {
    fn to_token(&self) -> String {
        self.to_string()
    }
}

impl WaSymbol for (i64, i64) {
    fn to_token(&self) -> String {
        format!("{},{}", self.0, self.1)
    }
}

/// Result of parsing a `.wa` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WaFile {
    Weighted(WeightedOmegaAutomaton),
    FiniteWeighted(WeightedOmegaAutomaton),
    Acceptor(OmegaAcceptor<String>),
}

pub fn serialize_weighted(wa: &WeightedOmegaAutomaton, finite: bool) -> String {
    let mut s = String::new();
    s.push_str("wa v1\n");
    let _ = writeln!(s, "mode {}", if finite { "finite" } else { "omega" });
    let _ = writeln!(s, "states {}", wa.state_count);
    let _ = writeln!(s, "init {}", wa.initial);
    let _ = writeln!(s, "alphabet {}", wa.alphabet.join(" "));
    for t in &wa.transitions {
        let _ = writeln!(s, "trans {} {} {} {}", t.src, wa.alphabet[t.letter], t.dst, t.weight);
    }
    s
}

pub fn serialize_acceptor<S: WaSymbol>(acc: &OmegaAcceptor<S>) -> String {
    let mut s = String::new();
    s.push_str("wa v1\n");
    s.push_str("mode omega\n");
    let _ = writeln!(s, "states {}", acc.state_count);
    let _ = writeln!(s, "init {}", acc.initial);
    let tokens: Vec<String> = acc.alphabet.iter().map(|a| a.to_token()).collect();
    let _ = writeln!(s, "alphabet {}", tokens.join(" "));
    for (src, es) in acc.edges.iter().enumerate() {
        for &(sym, dst) in es {
            let _ = writeln!(s, "trans {} {} {} 0", src, tokens[sym], dst);
        }
    }
    let _ = writeln!(s, "acceptance {}", acc.acceptance.class_name());
    let accepting: Vec<String> = (0..acc.state_count)
        .filter(|&q| acc.state_accepting(q))
        .map(|q| q.to_string())
        .collect();
    let _ = writeln!(s, "accepting {}", accepting.join(" "));
    if let Acceptance::Weak(p) = &acc.acceptance {
        for b in 0..p.block_count() {
            let members: Vec<String> = (0..acc.state_count)
                .filter(|&q| p.block_of[q] == b)
                .map(|q| q.to_string())
                .collect();
            let _ = writeln!(s, "partition {}: {}", b, members.join(" "));
        }
        for &(lo, hi) in &p.order {
            let _ = writeln!(s, "order {}<{}", lo, hi);
        }
    }
    s
}

struct RawWa {
    mode: String,
    states: usize,
    init: StateId,
    alphabet: Vec<String>,
    trans: Vec<(StateId, usize, StateId, i64)>,
    acceptance: Option<String>,
    accepting: BTreeSet<StateId>,
    partition: Vec<(usize, Vec<StateId>)>,
    order: BTreeSet<(usize, usize)>,
}

fn parse_raw(text: &str) -> Result<RawWa, ParseError> {
    let mut header_seen = false;
    let mut mode = String::from("omega");
    let mut states: Option<usize> = None;
    let mut init: Option<usize> = None;
    let mut alphabet: Vec<String> = Vec::new();
    let mut trans = Vec::new();
    let mut acceptance: Option<String> = None;
    let mut accepting = BTreeSet::new();
    let mut accepting_seen = false;
    let mut partition = Vec::new();
    let mut order = BTreeSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        match head {
            "wa" => {
                if rest != ["v1"] {
                    return Err(err(ln, "expected header `wa v1`"));
                }
                header_seen = true;
            }
            "mode" => {
                let m = rest.first().ok_or_else(|| err(ln, "mode needs a value"))?;
                if *m != "omega" && *m != "finite" {
                    return Err(err(ln, format!("unknown mode `{m}`")));
                }
                mode = m.to_string();
            }
            "states" => {
                let n = rest
                    .first()
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| err(ln, "states needs a nonnegative integer"))?;
                states = Some(n);
            }
            "init" => {
                let n = rest
                    .first()
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| err(ln, "init needs a state id"))?;
                init = Some(n);
            }
            "alphabet" => {
                if rest.is_empty() {
                    return Err(err(ln, "alphabet must list at least one symbol"));
                }
                alphabet = rest.iter().map(|s| s.to_string()).collect();
            }
            "trans" => {
                if rest.len() != 4 {
                    return Err(err(ln, "trans needs SRC SYM DST WEIGHT"));
                }
                let src = rest[0].parse::<usize>().map_err(|_| err(ln, "bad source state"))?;
                let sym = alphabet
                    .iter()
                    .position(|a| a == rest[1])
                    .ok_or_else(|| err(ln, format!("symbol `{}` not in alphabet", rest[1])))?;
                let dst = rest[2].parse::<usize>().map_err(|_| err(ln, "bad destination state"))?;
                let weight = rest[3].parse::<i64>().map_err(|_| err(ln, "bad weight"))?;
                trans.push((src, sym, dst, weight));
            }
            "acceptance" => {
                let a = rest.first().ok_or_else(|| err(ln, "acceptance needs a class"))?;
                match *a {
                    "safety" | "cosafety" | "weak" | "buchi" => acceptance = Some(a.to_string()),
                    other => return Err(err(ln, format!("unknown directive `{other}`"))),
                }
            }
            "accepting" => {
                accepting_seen = true;
                for v in rest {
                    let q = v.parse::<usize>().map_err(|_| err(ln, "bad state id in accepting"))?;
                    accepting.insert(q);
                }
            }
            "partition" => {
                let joined = rest.join(" ");
                let (b, members) = joined
                    .split_once(':')
                    .ok_or_else(|| err(ln, "partition needs `b: i j ...`"))?;
                let b = b.trim().parse::<usize>().map_err(|_| err(ln, "bad block id"))?;
                let mut ms = Vec::new();
                for v in members.split_whitespace() {
                    ms.push(v.parse::<usize>().map_err(|_| err(ln, "bad state id in partition"))?);
                }
                partition.push((b, ms));
            }
            "order" => {
                let spec = rest.first().ok_or_else(|| err(ln, "order needs `b1<b2`"))?;
                let (lo, hi) = spec.split_once('<').ok_or_else(|| err(ln, "order needs `b1<b2`"))?;
                let lo = lo.parse::<usize>().map_err(|_| err(ln, "bad block id in order"))?;
                let hi = hi.parse::<usize>().map_err(|_| err(ln, "bad block id in order"))?;
                order.insert((lo, hi));
            }
            other => return Err(err(ln, format!("unknown directive `{other}`"))),
        }
    }
    if !header_seen {
        return Err(err(1, "missing header `wa v1`"));
    }
    let states = states.ok_or_else(|| err(1, "missing `states` directive"))?;
    let init = init.ok_or_else(|| err(1, "missing `init` directive"))?;
    if trans.is_empty() {
        return Err(err(1, "automaton has no transitions"));
    }
    if acceptance.is_some() && !accepting_seen {
        return Err(err(1, "acceptor is missing an `accepting` directive"));
    }
    Ok(RawWa { mode, states, init, alphabet, trans, acceptance, accepting, partition, order })
}

/// Parses a `.wa` file. With `auto_complete` set, acceptors with a partial
/// transition relation get an explicit rejecting sink; weighted automata must
/// be complete as given.
pub fn parse_wa(text: &str, auto_complete: bool) -> Result<WaFile, ParseError> {
    let raw = parse_raw(text)?;
    match raw.acceptance {
        None => {
            let transitions: Vec<WTransition> = raw
                .trans
                .iter()
                .map(|&(src, letter, dst, weight)| WTransition { src, letter, weight, dst })
                .collect();
            let bound = transitions.iter().map(|t| t.weight.abs()).max().unwrap_or(0).max(1);
            let wa = WeightedOmegaAutomaton::new(raw.alphabet, raw.states, raw.init, transitions, bound)
                .map_err(|e| err(1, e.to_string()))?;
            if raw.mode == "finite" {
                Ok(WaFile::FiniteWeighted(wa))
            } else {
                Ok(WaFile::Weighted(wa))
            }
        }
        Some(class) => {
            let mut edges: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); raw.states];
            for &(src, sym, dst, _) in &raw.trans {
                if src >= raw.states || dst >= raw.states {
                    return Err(err(1, format!("transition {src}->{dst} out of range")));
                }
                edges[src].push((sym, dst));
            }
            let acceptance = match class.as_str() {
                "safety" => Acceptance::Safety {
                    rejecting: (0..raw.states).filter(|q| !raw.accepting.contains(q)).collect(),
                },
                "cosafety" => Acceptance::CoSafety { accepting: raw.accepting.clone() },
                "buchi" => Acceptance::Buchi { accepting: raw.accepting.clone() },
                "weak" => {
                    let nblocks = raw.partition.iter().map(|(b, _)| b + 1).max().unwrap_or(0);
                    if nblocks == 0 {
                        return Err(err(1, "weak acceptor needs partition lines"));
                    }
                    let mut block_of = vec![usize::MAX; raw.states];
                    for (b, members) in &raw.partition {
                        for &q in members {
                            if q >= raw.states {
                                return Err(err(1, format!("partition state {q} out of range")));
                            }
                            block_of[q] = *b;
                        }
                    }
                    if let Some(q) = block_of.iter().position(|&b| b == usize::MAX) {
                        return Err(err(1, format!("state {q} missing from partition")));
                    }
                    let mut block_accepting = vec![false; nblocks];
                    for &q in &raw.accepting {
                        block_accepting[block_of[q]] = true;
                    }
                    // Uniformity: no rejecting state may share a block with an
                    // accepting one.
                    for q in 0..raw.states {
                        if block_accepting[block_of[q]] && !raw.accepting.contains(&q) {
                            return Err(err(1, format!("block {} is not uniform", block_of[q])));
                        }
                    }
                    Acceptance::Weak(WeakPartition {
                        block_of,
                        block_accepting,
                        order: raw.order,
                    })
                }
                _ => unreachable!(),
            };
            let mut acc = OmegaAcceptor {
                alphabet: raw.alphabet,
                state_count: raw.states,
                initial: raw.init,
                edges,
                acceptance,
                deterministic: false,
            };
            acc.deterministic = acc.check_deterministic();
            if auto_complete {
                acc.complete_with_sink();
            }
            acc.validate().map_err(|e| err(1, e.to_string()))?;
            Ok(WaFile::Acceptor(acc))
        }
    }
}

pub fn emit_dot_weighted(wa: &WeightedOmegaAutomaton, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {name} {{");
    let _ = writeln!(s, "  rankdir=LR;");
    let _ = writeln!(s, "  __init [shape=point];");
    let _ = writeln!(s, "  __init -> s{};", wa.initial);
    for q in 0..wa.state_count {
        let _ = writeln!(s, "  s{q} [shape=circle,label=\"{q}\"];");
    }
    for t in &wa.transitions {
        let _ = writeln!(
            s,
            "  s{} -> s{} [label=\"{}:{}\"];",
            t.src, t.dst, wa.alphabet[t.letter], t.weight
        );
    }
    s.push_str("}\n");
    s
}

pub fn emit_dot_acceptor<S: WaSymbol>(acc: &OmegaAcceptor<S>, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {name} {{");
    let _ = writeln!(s, "  rankdir=LR;");
    let _ = writeln!(s, "  __init [shape=point];");
    let _ = writeln!(s, "  __init -> s{};", acc.initial);
    for q in 0..acc.state_count {
        let shape = if acc.state_accepting(q) { "doublecircle" } else { "circle" };
        let _ = writeln!(s, "  s{q} [shape={shape},label=\"{q}\"];");
    }
    for (src, es) in acc.edges.iter().enumerate() {
        for &(sym, dst) in es {
            let _ = writeln!(s, "  s{} -> s{} [label=\"{}\"];", src, dst, acc.alphabet[sym].to_token());
        }
    }
    s.push_str("}\n");
    s
}
