//! Line-oriented text formats for instances, fractional solutions and cuts.
//!
//! ```text
//! # directed instance          # node-weighted instance
//! p dirmc <n> <m> <k>          p nodemc <n> <m> <k>
//! t <id>        (k lines)      t <id>        (k lines)
//! a <u> <v> <w|inf> (m lines)  n <id> <w|inf> (n lines)
//!                              e <u> <v>     (m lines)
//! ```
//!
//! Fractional solutions are `x <u> <v> <value>` lines in arc order or
//! `xn <id> <value>` lines; cuts are `cut a <u> <v> [<arc>]` / `cut n <id>` lines
//! followed by `cost <value>`. Ids are 1-based; `#` starts a comment.
//! Numbers are written in shortest round-trip form, so reading back what
//! was written reproduces every `f64` exactly.

use std::fmt::Write as _;

use crate::cut::{CutKind, CutSolution};
use crate::error::{Error, Result};
use crate::instance::{Arc, DirectedInstance, Instance, Mode, NodeInstance, Weight};
use crate::lp::FractionalSolution;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn tokens(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn expect_len(line: usize, toks: &[&str], len: usize) -> Result<()> {
    if toks.len() != len {
        return Err(err(line, format!("`{}` line needs {} fields, got {}", toks[0], len - 1, toks.len() - 1)));
    }
    Ok(())
}

fn parse_count(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| err(line, format!("bad count `{tok}`")))
}

/// Parse a 1-based node id into a 0-based one.
fn parse_id(line: usize, tok: &str, n: usize) -> Result<usize> {
    let id: usize = tok.parse().map_err(|_| err(line, format!("bad node id `{tok}`")))?;
    if id == 0 || id > n {
        return Err(err(line, format!("node id {id} out of range 1..={n}")));
    }
    Ok(id - 1)
}

fn parse_weight(line: usize, tok: &str) -> Result<Weight> {
    tok.parse().map_err(|msg: String| err(line, msg))
}

fn parse_value(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| err(line, format!("bad value `{tok}`")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(err(line, format!("value {tok} is not a finite nonnegative number")));
    }
    Ok(v)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = tokens(text);
    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty input, expected `p` header"))?;
    if header[0] != "p" {
        return Err(err(hline, "first line must be the `p` header"));
    }
    expect_len(hline, &header, 5)?;
    let n = parse_count(hline, header[2])?;
    let m = parse_count(hline, header[3])?;
    let k = parse_count(hline, header[4])?;
    let mode = match header[1] {
        "dirmc" => Mode::Edge,
        "nodemc" => Mode::Node,
        other => return Err(err(hline, format!("unknown problem kind `{other}`"))),
    };

    let mut terminals = Vec::with_capacity(k);
    let mut is_terminal = vec![false; n];
    let mut arcs = Vec::new();
    let mut edges = Vec::new();
    let mut weights: Vec<Option<Weight>> = vec![None; n];
    let mut last = hline;
    for (line, toks) in lines {
        last = line;
        match (toks[0], mode) {
            ("t", _) => {
                expect_len(line, &toks, 2)?;
                let s = parse_id(line, toks[1], n)?;
                if is_terminal[s] {
                    return Err(err(line, format!("duplicate terminal {}", s + 1)));
                }
                if terminals.len() == k {
                    return Err(err(line, format!("more than {k} terminals")));
                }
                is_terminal[s] = true;
                terminals.push(s);
            }
            ("a", Mode::Edge) => {
                expect_len(line, &toks, 4)?;
                let u = parse_id(line, toks[1], n)?;
                let v = parse_id(line, toks[2], n)?;
                if u == v {
                    return Err(err(line, format!("self-loop at node {}", u + 1)));
                }
                if arcs.len() == m {
                    return Err(err(line, format!("more than {m} arcs")));
                }
                arcs.push(Arc { tail: u, head: v, weight: parse_weight(line, toks[3])? });
            }
            ("n", Mode::Node) => {
                expect_len(line, &toks, 3)?;
                let v = parse_id(line, toks[1], n)?;
                if weights[v].is_some() {
                    return Err(err(line, format!("duplicate weight for node {}", v + 1)));
                }
                weights[v] = Some(parse_weight(line, toks[2])?);
            }
            ("e", Mode::Node) => {
                expect_len(line, &toks, 3)?;
                let u = parse_id(line, toks[1], n)?;
                let v = parse_id(line, toks[2], n)?;
                if u == v {
                    return Err(err(line, format!("self-loop at node {}", u + 1)));
                }
                if edges.len() == m {
                    return Err(err(line, format!("more than {m} edges")));
                }
                edges.push((u, v));
            }
            ("p", _) => return Err(err(line, "duplicate `p` header")),
            (other, _) => return Err(err(line, format!("unexpected `{other}` line"))),
        }
    }
    if terminals.len() != k {
        return Err(err(last, format!("header announces {k} terminals, found {}", terminals.len())));
    }
    if k < 2 {
        return Err(err(hline, "need at least 2 terminals"));
    }
    match mode {
        Mode::Edge => {
            if arcs.len() != m {
                return Err(err(last, format!("header announces {m} arcs, found {}", arcs.len())));
            }
            DirectedInstance::new(n, arcs, terminals)
                .map(Instance::Directed)
                .map_err(|e| err(hline, e.to_string()))
        }
        Mode::Node => {
            if edges.len() != m {
                return Err(err(last, format!("header announces {m} edges, found {}", edges.len())));
            }
            let weights = weights
                .into_iter()
                .enumerate()
                .map(|(v, w)| w.ok_or_else(|| err(last, format!("missing weight line for node {}", v + 1))))
                .collect::<Result<Vec<_>>>()?;
            NodeInstance::new(n, edges, weights, terminals)
                .map(Instance::Node)
                .map_err(|e| err(hline, e.to_string()))
        }
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    match inst {
        Instance::Directed(d) => {
            let _ = writeln!(out, "p dirmc {} {} {}", d.n(), d.m(), d.k());
            for &s in d.terminals() {
                let _ = writeln!(out, "t {}", s + 1);
            }
            for a in d.arcs() {
                let _ = writeln!(out, "a {} {} {}", a.tail + 1, a.head + 1, a.weight);
            }
        }
        Instance::Node(g) => {
            let _ = writeln!(out, "p nodemc {} {} {}", g.n(), g.m(), g.k());
            for &s in g.terminals() {
                let _ = writeln!(out, "t {}", s + 1);
            }
            for (v, w) in g.weights().iter().enumerate() {
                let _ = writeln!(out, "n {} {}", v + 1, w);
            }
            for &(u, v) in g.edges() {
                let _ = writeln!(out, "e {} {}", u + 1, v + 1);
            }
        }
    }
    out
}

pub fn serialize_fractional(inst: &Instance, x: &FractionalSolution) -> Result<String> {
    let mut out = String::new();
    match inst {
        Instance::Directed(d) => {
            x.check_len(Mode::Edge, d.m())?;
            for (a, v) in d.arcs().iter().zip(&x.values) {
                let _ = writeln!(out, "x {} {} {}", a.tail + 1, a.head + 1, v);
            }
        }
        Instance::Node(g) => {
            x.check_len(Mode::Node, g.n())?;
            for (v, val) in x.values.iter().enumerate() {
                let _ = writeln!(out, "xn {} {}", v + 1, val);
            }
        }
    }
    Ok(out)
}

pub fn parse_fractional(text: &str, inst: &Instance) -> Result<FractionalSolution> {
    match inst {
        Instance::Directed(d) => {
            let mut values = Vec::with_capacity(d.m());
            let mut last = 0;
            for (line, toks) in tokens(text) {
                last = line;
                if toks[0] != "x" {
                    return Err(err(line, format!("expected `x` line, got `{}`", toks[0])));
                }
                expect_len(line, &toks, 4)?;
                let arc = d
                    .arcs()
                    .get(values.len())
                    .ok_or_else(|| err(line, format!("more than {} arc values", d.m())))?;
                let u = parse_id(line, toks[1], d.n())?;
                let v = parse_id(line, toks[2], d.n())?;
                if (u, v) != (arc.tail, arc.head) {
                    return Err(err(
                        line,
                        format!("arc {} is {} -> {}, line names {} -> {}", values.len() + 1, arc.tail + 1, arc.head + 1, u + 1, v + 1),
                    ));
                }
                values.push(parse_value(line, toks[3])?);
            }
            if values.len() != d.m() {
                return Err(err(last, format!("expected {} arc values, found {}", d.m(), values.len())));
            }
            Ok(FractionalSolution::edge(values))
        }
        Instance::Node(g) => {
            let mut values: Vec<Option<f64>> = vec![None; g.n()];
            let mut last = 0;
            for (line, toks) in tokens(text) {
                last = line;
                if toks[0] != "xn" {
                    return Err(err(line, format!("expected `xn` line, got `{}`", toks[0])));
                }
                expect_len(line, &toks, 3)?;
                let v = parse_id(line, toks[1], g.n())?;
                if values[v].is_some() {
                    return Err(err(line, format!("duplicate value for node {}", v + 1)));
                }
                values[v] = Some(parse_value(line, toks[2])?);
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(v, x)| x.ok_or_else(|| err(last, format!("missing value for node {}", v + 1))))
                .collect::<Result<Vec<_>>>()?;
            Ok(FractionalSolution::node(values))
        }
    }
}

pub fn serialize_cut(inst: &Instance, cut: &CutSolution) -> String {
    let mut out = String::new();
    match inst {
        Instance::Directed(d) => {
            for &e in &cut.members {
                let a = &d.arcs()[e];
                let parallel = d.arcs().iter().filter(|b| b.tail == a.tail && b.head == a.head).count() > 1;
                if parallel {
                    let _ = writeln!(out, "cut a {} {} {}", a.tail + 1, a.head + 1, e + 1);
                } else {
                    let _ = writeln!(out, "cut a {} {}", a.tail + 1, a.head + 1);
                }
            }
        }
        Instance::Node(_) => {
            for &v in &cut.members {
                let _ = writeln!(out, "cut n {}", v + 1);
            }
        }
    }
    let _ = writeln!(out, "cost {}", cut.cost);
    out
}

/// Parse a cut file. Arcs with parallel copies are written as
/// `cut a u v i` with the 1-based arc index `i`; a plain `cut a u v`
/// resolves to the lowest-index arc `u -> v` not already named. The stated
/// cost must match the recomputed one.
pub fn parse_cut(text: &str, inst: &Instance) -> Result<CutSolution> {
    let mut members = Vec::new();
    let mut stated_cost = None;
    let mut last = 0;
    let mut taken = vec![false; match inst {
        Instance::Directed(d) => d.m(),
        Instance::Node(g) => g.n(),
    }];
    for (line, toks) in tokens(text) {
        last = line;
        if stated_cost.is_some() {
            return Err(err(line, "content after the `cost` line"));
        }
        match (toks[0], inst) {
            ("cost", _) => {
                expect_len(line, &toks, 2)?;
                stated_cost = Some(parse_value(line, toks[1])?);
            }
            ("cut", Instance::Directed(d)) => {
                if toks.len() != 5 {
                    expect_len(line, &toks, 4)?;
                }
                if toks[1] != "a" {
                    return Err(err(line, "directed instances take `cut a <u> <v>` lines"));
                }
                let u = parse_id(line, toks[2], d.n())?;
                let v = parse_id(line, toks[3], d.n())?;
                let e = match toks.get(4) {
                    Some(tok) => {
                        let e = parse_id(line, tok, d.m())?;
                        let a = &d.arcs()[e];
                        if (a.tail, a.head) != (u, v) {
                            return Err(err(line, format!("arc {} is not {} -> {}", e + 1, u + 1, v + 1)));
                        }
                        if taken[e] {
                            return Err(err(line, format!("arc {} listed twice", e + 1)));
                        }
                        e
                    }
                    None => (0..d.m())
                        .find(|&i| !taken[i] && d.arcs()[i].tail == u && d.arcs()[i].head == v)
                        .ok_or_else(|| err(line, format!("no unused arc {} -> {}", u + 1, v + 1)))?,
                };
                taken[e] = true;
                members.push(e);
            }
            ("cut", Instance::Node(g)) => {
                expect_len(line, &toks, 3)?;
                if toks[1] != "n" {
                    return Err(err(line, "node instances take `cut n <id>` lines"));
                }
                let v = parse_id(line, toks[2], g.n())?;
                if taken[v] {
                    return Err(err(line, format!("node {} listed twice", v + 1)));
                }
                taken[v] = true;
                members.push(v);
            }
            (other, _) => return Err(err(line, format!("unexpected `{other}` line"))),
        }
    }
    let stated = stated_cost.ok_or_else(|| err(last.max(1), "missing `cost` line"))?;
    let cut = match inst {
        Instance::Directed(d) => CutSolution::edges(d, members),
        Instance::Node(g) => CutSolution::nodes(g, members),
    }
    .map_err(|e| err(last, e.to_string()))?;
    if (cut.cost - stated).abs() > 1e-9 * stated.abs().max(1.0) {
        return Err(err(last, format!("stated cost {stated} but members sum to {}", cut.cost)));
    }
    debug_assert!(matches!(
        (cut.kind, inst),
        (CutKind::Edge, Instance::Directed(_)) | (CutKind::Node, Instance::Node(_))
    ));
    Ok(cut)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALLEST: &str = "p dirmc 2 2 2\nt 1\nt 2\na 1 2 1\na 2 1 1\n";

    fn directed(text: &str) -> DirectedInstance {
        match parse_instance(text).unwrap() {
            Instance::Directed(d) => d,
            other => panic!("expected directed instance, got {other:?}"),
        }
    }

    #[test]
    fn parses_smallest_instance() {
        let d = directed(SMALLEST);
        assert_eq!((d.n(), d.m(), d.k()), (2, 2, 2));
        assert_eq!(d.terminals(), &[0, 1]);
        assert_eq!(d.arcs()[1], Arc::new(1, 0, 1.0));
    }

    #[test]
    fn self_loop_reported_with_line() {
        let text = "p dirmc 2 2 2\nt 1\nt 2\na 1 1 1\na 2 1 1\n";
        match parse_instance(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("self-loop"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("q dirmc 2 0 2\n", 1),
            ("p dirmc 2 0 2\nt 1\nt 1\n", 3),
            ("p dirmc 2 0 2\nt 1\nt 3\n", 3),
            ("# c\np dirmc 2 1 2\nt 1\nt 2\na 1 2 -3\n", 5),
            ("p dirmc 2 1 2\nt 1\nt 2\na 1 2 x\n", 4),
            ("p dirmc 2 1 2\nt 1\nt 2\n", 3),
            ("p nodemc 2 0 2\nt 1\nt 2\nn 1 1\n", 4),
            ("p dirmc 2 0 2\nt 1\nt 2\ne 1 2\n", 4),
        ];
        for (text, want) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# header follows\n\np dirmc 2 2 2 # trailing\nt 1\n\nt 2\na 1 2 1\na 2 1 inf\n";
        let d = directed(text);
        assert_eq!(d.arcs()[1].weight, Weight::Infinite);
    }

    #[test]
    fn serializes_header_and_node_lines() {
        let d = DirectedInstance::new(2, vec![Arc::new(0, 1, 1.0)], vec![0, 1]).unwrap();
        let text = serialize_instance(&d.into());
        assert!(text.contains("p dirmc 2 1 2"), "{text}");

        let star = NodeInstance::new(
            4,
            vec![(0, 3), (1, 3), (2, 3)],
            vec![Weight::Infinite, Weight::Infinite, Weight::Infinite, 1.0.into()],
            vec![0, 1, 2],
        )
        .unwrap();
        let text = serialize_instance(&star.clone().into());
        assert!(text.lines().any(|l| l == "n 4 1"), "{text}");
        assert_eq!(parse_instance(&text).unwrap(), Instance::Node(star));
    }

    #[test]
    fn fractional_round_trip_is_bit_exact() {
        let inst: Instance = directed(SMALLEST).into();
        let x = FractionalSolution::edge(vec![0.1 + 0.2, 1.0 / 3.0]);
        let text = serialize_fractional(&inst, &x).unwrap();
        assert_eq!(parse_fractional(&text, &inst).unwrap(), x);
        assert!(parse_fractional("x 2 1 0.5\nx 1 2 0.5\n", &inst).is_err());
        assert!(parse_fractional("x 1 2 0.5\n", &inst).is_err());
    }

    #[test]
    fn cut_round_trip_with_parallel_arcs() {
        let d = DirectedInstance::new(
            2,
            vec![Arc::new(0, 1, 2.0), Arc::new(0, 1, 3.0), Arc::new(1, 0, 1.0)],
            vec![0, 1],
        )
        .unwrap();
        let inst: Instance = d.clone().into();
        let cut = CutSolution::edges(&d, vec![1, 2]).unwrap();
        let text = serialize_cut(&inst, &cut);
        assert!(text.starts_with("cut a 1 2 2\n"));
        assert_eq!(parse_cut(&text, &inst).unwrap(), cut);
        // Without the index the lowest unused copy is taken.
        assert_eq!(parse_cut("cut a 1 2\ncost 2\n", &inst).unwrap().members, vec![0]);
        assert!(parse_cut("cut a 1 2 3\ncost 1\n", &inst).is_err());
        let full = CutSolution::edges(&d, vec![0, 1, 2]).unwrap();
        assert_eq!(parse_cut(&serialize_cut(&inst, &full), &inst).unwrap(), full);
    }
}
