//! Plain-text graph files.
//!
//! ```text
//! nodes <n_people> <n_pages>
//! P <id> <age> <F|M> <country>
//! G <id>
//! F <u> <v>
//! L <person> <page>
//! ```

use std::io::{BufRead, Write};

use super::{Gender, NodeAttrs, NodeId, SocialGraph};
use crate::{Error, Result};

pub fn write_graph<W: Write>(graph: &SocialGraph, mut out: W) -> Result<()> {
    writeln!(out, "nodes {} {}", graph.person_count(), graph.page_count())?;
    for (i, attrs) in graph.nodes().iter().enumerate() {
        if let NodeAttrs::Person {
            age,
            gender,
            country,
        } = attrs
        {
            writeln!(out, "P {i} {age} {} {country}", gender.code())?;
        }
    }
    for (i, attrs) in graph.nodes().iter().enumerate() {
        if attrs.is_page() {
            writeln!(out, "G {i}")?;
        }
    }
    for (u, v) in graph.friend_edges() {
        writeln!(out, "F {u} {v}")?;
    }
    for (u, p) in graph.follow_edges() {
        writeln!(out, "L {u} {p}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn graph_to_string(graph: &SocialGraph) -> String {
    let mut buf = Vec::new();
    write_graph(graph, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what}")))
}

pub fn read_graph<R: BufRead>(input: R) -> Result<SocialGraph> {
    let mut declared: Option<(usize, usize)> = None;
    let mut nodes: Vec<Option<NodeAttrs>> = Vec::new();
    let mut friends = Vec::new();
    let mut follows = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut toks = line.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        if tag != "nodes" && declared.is_none() {
            return Err(Error::parse(lineno, "expected `nodes` header first"));
        }
        let mut put = |id: usize, attrs: NodeAttrs| -> Result<()> {
            match nodes.get_mut(id) {
                Some(slot @ None) => {
                    *slot = Some(attrs);
                    Ok(())
                }
                Some(Some(_)) => Err(Error::parse(lineno, format!("node {id} defined twice"))),
                None => Err(Error::parse(lineno, format!("node id {id} out of range"))),
            }
        };
        match tag {
            "nodes" => {
                if declared.is_some() {
                    return Err(Error::parse(lineno, "duplicate header"));
                }
                let people: usize = field(toks.next(), lineno, "person count")?;
                let pages: usize = field(toks.next(), lineno, "page count")?;
                declared = Some((people, pages));
                nodes = vec![None; people + pages];
            }
            "P" => {
                let id: usize = field(toks.next(), lineno, "id")?;
                let age: u8 = field(toks.next(), lineno, "age")?;
                let gender = match toks.next() {
                    Some("F") => Gender::Female,
                    Some("M") => Gender::Male,
                    _ => return Err(Error::parse(lineno, "gender must be F or M")),
                };
                let country: u16 = field(toks.next(), lineno, "country")?;
                put(
                    id,
                    NodeAttrs::Person {
                        age,
                        gender,
                        country,
                    },
                )?;
            }
            "G" => {
                let id: usize = field(toks.next(), lineno, "id")?;
                put(id, NodeAttrs::Page)?;
            }
            "F" => {
                let u: u32 = field(toks.next(), lineno, "endpoint")?;
                let v: u32 = field(toks.next(), lineno, "endpoint")?;
                friends.push((NodeId(u), NodeId(v)));
            }
            "L" => {
                let u: u32 = field(toks.next(), lineno, "person")?;
                let p: u32 = field(toks.next(), lineno, "page")?;
                follows.push((NodeId(u), NodeId(p)));
            }
            other => return Err(Error::parse(lineno, format!("unknown record `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(Error::parse(lineno, "trailing fields"));
        }
    }

    let (people, pages) = declared.ok_or_else(|| Error::parse(0, "empty graph file"))?;
    let nodes: Vec<NodeAttrs> = nodes
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.ok_or_else(|| Error::parse(0, format!("node {i} never defined"))))
        .collect::<Result<_>>()?;
    let graph = SocialGraph::new(nodes, friends, follows)?;
    if graph.person_count() != people || graph.page_count() != pages {
        return Err(Error::parse(0, "header counts do not match node records"));
    }
    Ok(graph)
}
