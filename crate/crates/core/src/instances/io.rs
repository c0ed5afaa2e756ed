//! Plain-text instance files.
//!
//! ```text
//! # comment
//! p graph <n> <m>
//! e <u> <v>            (m lines, 1-based vertices)
//!
//! p sg <n> <m>
//! b <i> <j> <J>        (m lines, 1-based spins)
//! h <i> <value>        (optional, nonzero fields only when written)
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{Bond, GraphInstance, Instance, SpinGlassInstance};
use crate::{Error, Result};

/// Canonical text form: edges/bonds in lexicographic order.
pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::new();
    match instance {
        Instance::Graph(g) => {
            writeln!(out, "p graph {} {}", g.n(), g.edge_count()).unwrap();
            for (u, v) in g.edges() {
                writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
            }
        }
        Instance::SpinGlass(sg) => {
            writeln!(out, "p sg {} {}", sg.n(), sg.bonds().len()).unwrap();
            for b in sg.bonds() {
                writeln!(out, "b {} {} {}", b.i + 1, b.j + 1, b.coupling).unwrap();
            }
            for (i, &h) in sg.fields().iter().enumerate() {
                if h != 0 {
                    writeln!(out, "h {} {}", i + 1, h).unwrap();
                }
            }
        }
    }
    out
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_instance(instance)).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

fn field<T: FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{token}`")))
}

fn index(token: Option<&str>, line: usize, n: usize, what: &str) -> Result<usize> {
    let one_based: usize = field(token, line, what)?;
    if one_based == 0 || one_based > n {
        return Err(Error::parse(line, format!("{what} {one_based} outside 1..={n}")));
    }
    Ok(one_based - 1)
}

fn no_trailing<'a>(mut tokens: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match tokens.next() {
        Some(t) => Err(Error::parse(line, format!("unexpected trailing token `{t}`"))),
        None => Ok(()),
    }
}

enum Kind {
    Graph,
    SpinGlass,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(Kind, usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut bonds = Vec::new();
    let mut fields: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let tag = tokens.next().expect("non-empty line");
        let Some((kind, n, _, _)) = &header else {
            if tag != "p" {
                return Err(Error::parse(line, "expected header `p graph|sg <n> <m>`"));
            }
            let kind = match tokens.next() {
                Some("graph") => Kind::Graph,
                Some("sg") => Kind::SpinGlass,
                other => {
                    return Err(Error::parse(
                        line,
                        format!("unknown instance kind `{}`", other.unwrap_or("")),
                    ))
                }
            };
            let n = field(tokens.next(), line, "vertex count")?;
            let m = field(tokens.next(), line, "edge count")?;
            no_trailing(tokens, line)?;
            fields = vec![0; n];
            header = Some((kind, n, m, line));
            continue;
        };
        let n = *n;
        match (kind, tag) {
            (Kind::Graph, "e") => {
                let u = index(tokens.next(), line, n, "vertex")?;
                let v = index(tokens.next(), line, n, "vertex")?;
                no_trailing(tokens, line)?;
                if u == v {
                    return Err(Error::parse(line, "self-loop"));
                }
                edges.push((u.min(v), u.max(v), line));
            }
            (Kind::SpinGlass, "b") => {
                let i = index(tokens.next(), line, n, "spin")?;
                let j = index(tokens.next(), line, n, "spin")?;
                let coupling = field(tokens.next(), line, "coupling")?;
                no_trailing(tokens, line)?;
                if i == j {
                    return Err(Error::parse(line, "self-coupling"));
                }
                bonds.push(Bond { i, j, coupling });
            }
            (Kind::SpinGlass, "h") => {
                let i = index(tokens.next(), line, n, "spin")?;
                fields[i] = field(tokens.next(), line, "field")?;
                no_trailing(tokens, line)?;
            }
            (_, tag) => return Err(Error::parse(line, format!("unexpected line tag `{tag}`"))),
        }
    }
    let Some((kind, n, m, header_line)) = header else {
        return Err(Error::parse(last_line.max(1), "missing header"));
    };
    match kind {
        Kind::Graph => {
            if edges.len() != m {
                return Err(Error::parse(
                    header_line,
                    format!("header promises {m} edges, found {}", edges.len()),
                ));
            }
            let mut seen = edges.clone();
            seen.sort_unstable();
            if let Some(w) = seen.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
                return Err(Error::parse(w[1].2, "duplicate edge"));
            }
            let graph = GraphInstance::from_edges(n, edges.into_iter().map(|(u, v, _)| (u, v)))?;
            Ok(Instance::Graph(graph))
        }
        Kind::SpinGlass => {
            if bonds.len() != m {
                return Err(Error::parse(
                    header_line,
                    format!("header promises {m} bonds, found {}", bonds.len()),
                ));
            }
            Ok(Instance::SpinGlass(SpinGlassInstance::new(n, bonds, fields)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::instances::{gen_erdos_renyi, gen_geometric, gen_pm_j_cubic};

    #[test]
    fn path_graph_from_handcrafted_file() {
        let inst = parse_instance("p graph 3 2\ne 1 2\ne 2 3\n").unwrap();
        let Instance::Graph(g) = inst else { panic!() };
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let inst = parse_instance("# made by hand\n\np graph 2 1\n# edge\ne 2 1\n").unwrap();
        assert_eq!(inst, Instance::Graph(GraphInstance::from_edges(2, [(0, 1)]).unwrap()));
    }

    #[test]
    fn malformed_header_names_line_one() {
        for text in ["p grph 3 2\n", "q graph 3 2\n", "p graph x 2\n", "e 1 2\n"] {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, 1, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn body_errors_carry_line_numbers() {
        let cases = [
            ("p graph 3 2\ne 1 2\ne 1 4\n", 3),
            ("p graph 3 2\ne 1 2\ne 2 1\n", 3),
            ("p graph 3 1\ne 1 1\n", 2),
            ("p graph 3 2\ne 1 2\n", 1),
            ("p sg 2 1\nb 1 2 x\n", 2),
            ("p sg 2 1\nb 1 2 1\ne 1 2\n", 3),
        ];
        for (text, expected) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn spin_glass_with_fields() {
        let text = "p sg 3 2\nb 1 2 -1\nb 2 3 1\nh 2 -3\n";
        let inst = parse_instance(text).unwrap();
        let Instance::SpinGlass(sg) = &inst else { panic!() };
        assert_eq!(sg.fields(), &[0, -3, 0]);
        assert_eq!(format_instance(&inst), text);
    }

    #[test]
    fn k4_round_trip_through_file() {
        let dir = std::env::temp_dir().join(format!("eo-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("k4.txt");
        let k4 = Instance::Graph(GraphInstance::complete(4));
        write_instance(&k4, &path).unwrap();
        assert_eq!(read_instance(&path).unwrap(), k4);
        std::fs::remove_dir_all(dir).unwrap();
        assert!(matches!(read_instance("/nonexistent/eo.txt"), Err(Error::Io { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn generated_instances_round_trip(seed in any::<u64>(), n in 2usize..200, c in 0.0f64..6.0, l in 2usize..6) {
            let c = c.min((n - 1) as f64);
            for inst in [
                Instance::Graph(gen_erdos_renyi(n, c, seed).unwrap()),
                Instance::Graph(gen_geometric(n, c, seed).unwrap()),
                Instance::SpinGlass(gen_pm_j_cubic(l, seed, None).unwrap()),
            ] {
                let text = format_instance(&inst);
                let back = parse_instance(&text).unwrap();
                prop_assert_eq!(&back, &inst);
                prop_assert_eq!(format_instance(&back), text);
            }
        }
    }
}
