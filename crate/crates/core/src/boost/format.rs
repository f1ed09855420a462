//! Plain-text model serialization.
//!
//! ```text
//! solartwin-gbt 1
//! base_score 0
//! learning_rate 0.3
//! domains 7 6 5
//! trees 2
//! tree 3
//! split 0 2 1 2
//! leaf -0.12
//! leaf 0.3
//! ...
//! ```
//! Floats are written in shortest round-trip form, so a saved f64 model
//! reloads bit-identical.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::boost::tree::{GbtModel, Node, Tree};
use crate::data::{create, open, DataError};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

const MAGIC: &str = "solartwin-gbt";
const VERSION: u32 = 1;

pub fn write_model<T: Scalar, W: Write>(model: &GbtModel<T>, mut w: W) -> Result<()> {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    let mut out = String::new();
    out.push_str(&format!("{MAGIC} {VERSION}\n"));
    out.push_str(&format!("base_score {:?}\n", f(model.base_score)));
    out.push_str(&format!("learning_rate {:?}\n", f(model.learning_rate)));
    let domains: Vec<String> = model.feature_domains.iter().map(|d| d.to_string()).collect();
    out.push_str(&format!("domains {}\n", domains.join(" ")));
    out.push_str(&format!("trees {}\n", model.trees.len()));
    for t in &model.trees {
        out.push_str(&format!("tree {}\n", t.nodes.len()));
        for n in &t.nodes {
            match n {
                Node::Split {
                    feature,
                    code,
                    left,
                    right,
                } => out.push_str(&format!("split {feature} {code} {left} {right}\n")),
                Node::Leaf { value } => out.push_str(&format!("leaf {:?}\n", f(*value))),
            }
        }
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

pub fn save_model<T: Scalar>(model: &GbtModel<T>, path: &Path) -> Result<()> {
    write_model(model, std::io::BufWriter::new(create(path)?))
}

fn io_err(source: std::io::Error) -> Error {
    Error::Data(DataError::Io {
        path: "<model>".into(),
        source,
    })
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("model line {line}: {msg}"))
}

struct Lines<R> {
    inner: std::io::Lines<BufReader<R>>,
    no: usize,
}

impl<R: Read> Lines<R> {
    fn next(&mut self) -> Result<(usize, String)> {
        loop {
            self.no += 1;
            match self.inner.next() {
                None => return Err(bad(self.no, "unexpected end of file")),
                Some(l) => {
                    let l = l.map_err(io_err)?;
                    let t = l.trim();
                    if !t.is_empty() {
                        return Ok((self.no, t.to_string()));
                    }
                }
            }
        }
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, Vec<String>)> {
        let (no, l) = self.next()?;
        let mut parts = l.split_whitespace().map(str::to_string);
        match parts.next() {
            Some(k) if k == key => Ok((no, parts.collect())),
            _ => Err(bad(no, format!("expected `{key}`"))),
        }
    }
}

fn parse<V: std::str::FromStr>(no: usize, s: Option<&String>) -> Result<V> {
    s.and_then(|s| s.parse().ok())
        .ok_or_else(|| bad(no, "malformed number"))
}

pub fn read_model<T: Scalar, R: Read>(r: R) -> Result<GbtModel<T>> {
    let mut lines = Lines {
        inner: BufReader::new(r).lines(),
        no: 0,
    };
    let (no, v) = lines.keyed(MAGIC)?;
    let version: u32 = parse(no, v.first())?;
    if version != VERSION {
        return Err(bad(no, format!("unsupported version {version}")));
    }
    let (no, v) = lines.keyed("base_score")?;
    let base_score: f64 = parse(no, v.first())?;
    let (no, v) = lines.keyed("learning_rate")?;
    let learning_rate: f64 = parse(no, v.first())?;
    let (no, v) = lines.keyed("domains")?;
    let feature_domains = v.iter().map(|d| parse(no, Some(d))).collect::<Result<Vec<usize>>>()?;
    let (no, v) = lines.keyed("trees")?;
    let n_trees: usize = parse(no, v.first())?;
    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let (no, v) = lines.keyed("tree")?;
        let n_nodes: usize = parse(no, v.first())?;
        if n_nodes == 0 {
            return Err(bad(no, "empty tree"));
        }
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let (no, l) = lines.next()?;
            let p: Vec<String> = l.split_whitespace().map(str::to_string).collect();
            let node = match p.first().map(String::as_str) {
                Some("split") => {
                    let feature: usize = parse(no, p.get(1))?;
                    let code: u8 = parse(no, p.get(2))?;
                    let left: usize = parse(no, p.get(3))?;
                    let right: usize = parse(no, p.get(4))?;
                    if feature >= feature_domains.len() || left >= n_nodes || right >= n_nodes {
                        return Err(bad(no, "split references a missing feature or node"));
                    }
                    if left <= nodes.len() || right <= nodes.len() {
                        return Err(bad(no, "child index must follow its parent"));
                    }
                    Node::Split {
                        feature,
                        code,
                        left,
                        right,
                    }
                }
                Some("leaf") => Node::Leaf {
                    value: lit(parse::<f64>(no, p.get(1))?),
                },
                _ => return Err(bad(no, "expected `split` or `leaf`")),
            };
            nodes.push(node);
        }
        trees.push(Tree { nodes });
    }
    Ok(GbtModel {
        trees,
        learning_rate: lit(learning_rate),
        base_score: lit(base_score),
        feature_domains,
    })
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<GbtModel<T>> {
    read_model(open(path)?)
}
