//! Plain-text matroid files.
//!
//! ```text
//! # comments run to the end of the line
//! k4 = graphic 4
//! edge 1 2
//! edge 1 3
//! ...
//! u = uniform 2 4
//! f = linear 2
//! row 1 0 0 1 1 0 1
//! ...
//! s = sparsepaving 3 6
//! hyperplane 1 2 3
//! r = r10
//! d = dual k4
//! m = minor k4 contract 1 delete 2 3
//! x = restrict k4 1 2 3
//! t = truncate k4
//! p = directsum k4 u
//! q = simplify p
//! ```
//!
//! The last definition is the document's matroid. Element and graph vertex
//! ids are 1-based. A document may also carry a tree-decomposition of that
//! matroid:
//!
//! ```text
//! vertex 1 graphic: 1 2 3
//! vertex 2 r10: 4 5 6 7
//! tedge 1 2
//! keep 1 2 4 5
//! ```
//!
//! Part labels (`graphic`, `cographic`, `r10`) are either given for every
//! vertex or for none. `keep` restricts the composed algorithm to a subset.

use std::collections::BTreeMap;
use std::path::Path;

use msl_core::combinators::PartLabel;
use msl_core::connectivity::TreeDecomposition;
use msl_core::matroid::{
    direct_sum, dual, minor, r10, restrict, share, simplify, truncate, GraphicMatroid, LinearMatroid,
    SparsePavingMatroid, UniformMatroid,
};
use msl_core::{ElementSet, MatroidRef};

use crate::{read_file, Error, Result};

#[derive(Debug, Clone)]
pub struct Document {
    pub name: String,
    pub matroid: MatroidRef,
    pub decomposition: Option<Decomposition>,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Vertex `i` of the tree is file vertex `i + 1`, and so is its label.
    pub tree: TreeDecomposition,
    pub part_labels: Option<Vec<PartLabel>>,
    pub keep: Option<ElementSet>,
}

pub fn load_document(path: &Path) -> Result<Document> {
    let text = read_file(path)?;
    parse_document(&text, &path.display().to_string())
}

enum Pending {
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    Linear { prime: u64, rows: Vec<Vec<i64>> },
    SparsePaving { rank: usize, size: usize, hyperplanes: Vec<Vec<usize>> },
}

struct Open {
    name: String,
    line: usize,
    body: Pending,
}

struct VertexLine {
    id: usize,
    label: Option<PartLabel>,
    elements: Vec<usize>,
}

struct Parser<'a> {
    origin: &'a str,
    defs: BTreeMap<String, MatroidRef>,
    last: Option<String>,
    open: Option<Open>,
    vertices: Vec<(usize, VertexLine)>,
    tedges: Vec<(usize, usize, usize)>,
    keep: Option<(usize, Vec<usize>)>,
}

pub fn parse_document(text: &str, origin: &str) -> Result<Document> {
    let mut p = Parser {
        origin,
        defs: BTreeMap::new(),
        last: None,
        open: None,
        vertices: Vec::new(),
        tedges: Vec::new(),
        keep: None,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            p.line(i + 1, line)?;
        }
    }
    p.close()?;
    let name = p.last.clone().ok_or_else(|| Error::parse(origin, 0, "no matroid defined"))?;
    let matroid = p.defs[&name].clone();
    let decomposition = p.decomposition(&matroid)?;
    Ok(Document { name, matroid, decomposition })
}

impl Parser<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::parse(self.origin, line, message)
    }

    fn invalid(&self, line: usize, e: impl std::fmt::Display) -> Error {
        Error::Validation(format!("{}:{line}: {e}", self.origin))
    }

    fn line(&mut self, n: usize, line: &str) -> Result<()> {
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "edge" | "row" | "hyperplane" => self.continuation(n, head, rest),
            "vertex" => self.vertex(n, rest),
            "tedge" => {
                let ids = ids(rest, self.origin, n)?;
                if ids.len() != 2 {
                    return Err(self.err(n, "tedge takes two vertex ids"));
                }
                self.tedges.push((n, ids[0], ids[1]));
                Ok(())
            }
            "keep" => {
                if self.keep.is_some() {
                    return Err(self.err(n, "keep given twice"));
                }
                self.keep = Some((n, elements(rest, self.origin, n)?));
                Ok(())
            }
            _ => {
                let (name, def) = line.split_once('=').ok_or_else(|| self.err(n, format!("cannot read {line:?}")))?;
                self.definition(n, name.trim(), def.trim())
            }
        }
    }

    fn continuation(&mut self, n: usize, head: &str, rest: &str) -> Result<()> {
        let origin = self.origin;
        let open = self.open.as_mut().ok_or_else(|| Error::parse(origin, n, format!("{head} outside a definition")))?;
        match (head, &mut open.body) {
            ("edge", Pending::Graphic { edges, .. }) => {
                let v = ids(rest, origin, n)?;
                if v.len() != 2 {
                    return Err(Error::parse(origin, n, "edge takes two vertex ids"));
                }
                edges.push((v[0] - 1, v[1] - 1));
            }
            ("row", Pending::Linear { rows, .. }) => {
                let row = rest
                    .split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| Error::parse(origin, n, format!("bad matrix entry {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
            ("hyperplane", Pending::SparsePaving { hyperplanes, .. }) => {
                hyperplanes.push(elements(rest, origin, n)?);
            }
            _ => return Err(Error::parse(origin, n, format!("{head} does not belong to {}", open.name))),
        }
        Ok(())
    }

    fn vertex(&mut self, n: usize, rest: &str) -> Result<()> {
        let (head, elems) = rest.split_once(':').ok_or_else(|| self.err(n, "vertex line needs ':'"))?;
        let mut words = head.split_whitespace();
        let id = words.next().ok_or_else(|| self.err(n, "vertex id missing"))?;
        let id = positive(id, self.origin, n)?;
        let label = match words.next() {
            Some(l) => Some(l.parse::<PartLabel>().map_err(|e| self.err(n, e.to_string()))?),
            None => None,
        };
        if words.next().is_some() {
            return Err(self.err(n, "vertex line has extra words before ':'"));
        }
        let elements = elements(elems, self.origin, n)?;
        self.vertices.push((n, VertexLine { id, label, elements }));
        Ok(())
    }

    fn reference(&self, n: usize, name: &str) -> Result<MatroidRef> {
        self.defs.get(name).cloned().ok_or_else(|| self.err(n, format!("unknown matroid {name:?}")))
    }

    fn definition(&mut self, n: usize, name: &str, def: &str) -> Result<()> {
        self.close()?;
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(self.err(n, format!("bad matroid name {name:?}")));
        }
        let words: Vec<&str> = def.split_whitespace().collect();
        let (&kind, args) = words.split_first().ok_or_else(|| self.err(n, "empty definition"))?;
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::parse(self.origin, n, format!("{kind} takes {k} argument(s), got {}", args.len())))
            }
        };
        let num = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(self.origin, n, format!("expected a number, got {s:?}")))
        };
        let built: MatroidRef = match kind {
            "uniform" => {
                arity(2)?;
                share(UniformMatroid::new(num(args[0])?, num(args[1])?).map_err(|e| self.invalid(n, e))?)
            }
            "graphic" | "linear" | "sparsepaving" => {
                let body = match kind {
                    "graphic" => {
                        arity(1)?;
                        Pending::Graphic { vertices: num(args[0])?, edges: Vec::new() }
                    }
                    "linear" => {
                        arity(1)?;
                        Pending::Linear { prime: num(args[0])? as u64, rows: Vec::new() }
                    }
                    _ => {
                        arity(2)?;
                        Pending::SparsePaving { rank: num(args[0])?, size: num(args[1])?, hyperplanes: Vec::new() }
                    }
                };
                self.open = Some(Open { name: name.to_string(), line: n, body });
                return Ok(());
            }
            "r10" => {
                arity(0)?;
                share(r10())
            }
            "dual" => {
                arity(1)?;
                share(dual(self.reference(n, args[0])?))
            }
            "truncate" => {
                arity(1)?;
                share(truncate(self.reference(n, args[0])?).map_err(|e| self.invalid(n, e))?)
            }
            "simplify" => {
                arity(1)?;
                share(simplify(self.reference(n, args[0])?).matroid)
            }
            "directsum" => {
                arity(2)?;
                share(direct_sum(self.reference(n, args[0])?, self.reference(n, args[1])?))
            }
            "restrict" => {
                let (base, rest) = args.split_first().ok_or_else(|| self.err(n, "restrict needs a matroid"))?;
                let keep = element_set(&rest.join(" "), self.origin, n)?;
                share(restrict(self.reference(n, base)?, &keep).map_err(|e| self.invalid(n, e))?)
            }
            "minor" => {
                let (base, rest) = args.split_first().ok_or_else(|| self.err(n, "minor needs a matroid"))?;
                let mut contract = Vec::new();
                let mut delete = Vec::new();
                let mut target: Option<&mut Vec<usize>> = None;
                for &w in rest {
                    match w {
                        "contract" => target = Some(&mut contract),
                        "delete" => target = Some(&mut delete),
                        _ => match target.as_mut() {
                            Some(t) => t.push(positive(w, self.origin, n)? - 1),
                            None => return Err(self.err(n, "expected 'contract' or 'delete'")),
                        },
                    }
                }
                let c: ElementSet = contract.into_iter().collect();
                let d: ElementSet = delete.into_iter().collect();
                share(minor(self.reference(n, base)?, &c, &d).map_err(|e| self.invalid(n, e))?)
            }
            other => return Err(self.err(n, format!("unknown matroid kind {other:?}"))),
        };
        self.insert(name, built);
        Ok(())
    }

    fn insert(&mut self, name: &str, m: MatroidRef) {
        self.defs.insert(name.to_string(), m);
        self.last = Some(name.to_string());
    }

    fn close(&mut self) -> Result<()> {
        let Some(open) = self.open.take() else {
            return Ok(());
        };
        let n = open.line;
        let built = match open.body {
            Pending::Graphic { vertices, edges } => {
                share(GraphicMatroid::new(vertices, edges).map_err(|e| self.invalid(n, e))?)
            }
            Pending::Linear { prime, rows } => {
                if rows.is_empty() {
                    return Err(self.invalid(n, "a linear matroid needs at least one row"));
                }
                share(LinearMatroid::new(prime, rows).map_err(|e| self.invalid(n, e))?)
            }
            Pending::SparsePaving { rank, size, hyperplanes } => {
                let hs = hyperplanes.into_iter().map(|h| h.into_iter().collect::<ElementSet>());
                share(SparsePavingMatroid::new(rank, size, hs).map_err(|e| self.invalid(n, e))?)
            }
        };
        self.insert(&open.name, built);
        Ok(())
    }

    fn decomposition(&self, m: &MatroidRef) -> Result<Option<Decomposition>> {
        if self.vertices.is_empty() {
            if let Some(&(n, _, _)) = self.tedges.first() {
                return Err(self.invalid(n, "tedge without vertices"));
            }
            if let Some((n, _)) = &self.keep {
                return Err(self.invalid(*n, "keep without a decomposition"));
            }
            return Ok(None);
        }
        let k = self.vertices.len();
        let mut slots: Vec<Option<&VertexLine>> = vec![None; k];
        for (n, v) in &self.vertices {
            if v.id > k {
                return Err(self.invalid(*n, format!("vertex ids must be 1..={k}, got {}", v.id)));
            }
            if slots[v.id - 1].replace(v).is_some() {
                return Err(self.invalid(*n, format!("vertex {} defined twice", v.id)));
            }
        }
        let slots: Vec<&VertexLine> = slots.into_iter().map(|s| s.expect("ids are a permutation")).collect();
        let mut edges = Vec::new();
        for &(n, u, v) in &self.tedges {
            if u > k || v > k {
                return Err(self.invalid(n, format!("tedge ({u}, {v}) names a missing vertex")));
            }
            edges.push((u - 1, v - 1));
        }
        let first = self.vertices[0].0;
        let parts = slots.iter().map(|v| v.elements.iter().copied().collect()).collect();
        let tree = TreeDecomposition::with_labels(m.ground_size(), parts, edges, (0..k).collect())
            .map_err(|e| self.invalid(first, e))?;
        let labelled = slots.iter().filter(|v| v.label.is_some()).count();
        let part_labels = match labelled {
            0 => None,
            l if l == k => Some(slots.iter().map(|v| v.label.expect("all labelled")).collect()),
            _ => return Err(self.invalid(first, "part labels must be given for every vertex or for none")),
        };
        let keep = match &self.keep {
            None => None,
            Some((n, elems)) => {
                let set: ElementSet = elems.iter().copied().collect();
                if set.bound() > m.ground_size() {
                    return Err(self.invalid(*n, format!("keep names element {} of {}", set.bound(), m.ground_size())));
                }
                Some(set)
            }
        };
        Ok(Some(Decomposition { tree, part_labels, keep }))
    }
}

fn positive(s: &str, origin: &str, line: usize) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::parse(origin, line, format!("expected a 1-based id, got {s:?}"))),
    }
}

fn ids(s: &str, origin: &str, line: usize) -> Result<Vec<usize>> {
    s.split_whitespace().map(|t| positive(t, origin, line)).collect()
}

/// 1-based ids in the text, 0-based in the result.
fn elements(s: &str, origin: &str, line: usize) -> Result<Vec<usize>> {
    Ok(ids(s, origin, line)?.into_iter().map(|e| e - 1).collect())
}

fn element_set(s: &str, origin: &str, line: usize) -> Result<ElementSet> {
    Ok(elements(s, origin, line)?.into_iter().collect())
}

/// Size and rank, for one-line summaries.
pub fn describe(m: &MatroidRef) -> String {
    format!("{} elements, rank {}", m.ground_size(), m.full_rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use msl_core::matroid::{count_bases, rank_functions_equal};

    fn parse(text: &str) -> Result<Document> {
        parse_document(text, "test")
    }

    #[test]
    fn graphic_k4_has_sixteen_bases() {
        let doc = parse("k4 = graphic 4\nedge 1 2\nedge 1 3\nedge 1 4\nedge 2 3\nedge 2 4\nedge 3 4\n").unwrap();
        assert_eq!(doc.name, "k4");
        assert_eq!(count_bases(doc.matroid.as_ref()).unwrap(), 16);
    }

    #[test]
    fn last_definition_wins_and_references_resolve() {
        let doc = parse("u = uniform 2 4 # U(2,4)\nd = dual u\n").unwrap();
        assert_eq!(doc.name, "d");
        assert_eq!(doc.matroid.full_rank(), 2);
        let m = parse("u = uniform 2 5\nm = minor u contract 1 delete 2 3\n").unwrap().matroid;
        assert_eq!((m.ground_size(), m.full_rank()), (2, 1));
    }

    #[test]
    fn linear_and_r10() {
        let a = parse("f = linear 2\nrow 1 0 0 1 1 0 1\nrow 0 1 0 1 0 1 1\nrow 0 0 1 0 1 1 1\n").unwrap();
        assert_eq!(a.matroid.full_rank(), 3);
        assert!(rank_functions_equal(a.matroid.as_ref(), msl_core::fixtures::fano().as_ref()).unwrap());
        let r = parse("r = r10\n").unwrap();
        assert_eq!((r.matroid.ground_size(), r.matroid.full_rank()), (10, 5));
    }

    #[test]
    fn sparse_paving_and_direct_sum() {
        let doc =
            parse("s = sparsepaving 3 6\nhyperplane 1 2 3\nhyperplane 4 5 6\nu = uniform 1 2\nt = directsum s u\n")
                .unwrap();
        assert_eq!((doc.matroid.ground_size(), doc.matroid.full_rank()), (8, 4));
        assert!(matches!(
            parse("s = sparsepaving 3 6\nhyperplane 1 2 3\nhyperplane 1 2 4\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn decomposition_lines() {
        let doc =
            parse("a = uniform 1 2\nb = uniform 1 2\nm = directsum a b\nvertex 2: 3 4\nvertex 1: 1 2\ntedge 1 2\n")
                .unwrap();
        let d = doc.decomposition.unwrap();
        assert_eq!(d.tree.part(0).to_vec(), vec![0, 1]);
        assert_eq!(d.tree.part(1).to_vec(), vec![2, 3]);
        assert!(d.part_labels.is_none());
        let labelled = parse("r = r10\nvertex 1 r10: 1 2 3 4 5 6 7 8 9 10\nkeep 1 2\n").unwrap().decomposition.unwrap();
        assert_eq!(labelled.part_labels, Some(vec![PartLabel::R10]));
        assert_eq!(labelled.keep.unwrap().to_vec(), vec![0, 1]);
    }

    #[test]
    fn syntax_errors_are_parse_errors() {
        for text in [
            "m = uniform 2",
            "m = uniform two 4",
            "edge 1 2",
            "m = frobnicate 3",
            "m = dual nothing",
            "just words",
            "m = uniform 2 4\nvertex 1 planar: 1 2",
            "m = graphic 3\nedge 0 1",
            "",
        ] {
            let err = parse(text).unwrap_err();
            assert_eq!(err.exit_code(), crate::exit::PARSE, "{text:?} gave {err}");
        }
    }

    #[test]
    fn semantic_errors_are_validation_errors() {
        for text in [
            "m = uniform 5 4",
            "m = graphic 3\nedge 1 4",
            "m = uniform 2 4\nr = restrict m 5",
            "m = uniform 1 2\nvertex 1: 1\nvertex 2: 2",
            "m = uniform 1 2\nvertex 1: 1 2\nkeep 3",
            "m = uniform 1 2\nvertex 1 graphic: 1\nvertex 2: 2\ntedge 1 2",
        ] {
            let err = parse(text).unwrap_err();
            assert_eq!(err.exit_code(), crate::exit::VALIDATION, "{text:?} gave {err}");
        }
    }
}
