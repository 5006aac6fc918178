//! Plain-text graph and community files.
//!
//! Graph file: a header line `n <count>` followed by one `u v` edge per line.
//! Community file: `community <i>: <ids>` lines (1-based `i`, consecutive)
//! and an optional `malicious: <ids>` line. Ids may be separated by spaces or
//! commas. Blank lines and `#` comments are ignored in both.

use std::fmt::Write as _;

use super::{AgentId, CommunityLayout, Graph, GraphError};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_id(line: usize, token: &str) -> Result<AgentId, GraphError> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid agent id `{token}`")))
}

fn parse_id_list(line: usize, text: &str) -> Result<Vec<AgentId>, GraphError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_id(line, t))
        .collect()
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `n <count>` header"))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count
            .parse::<usize>()
            .map_err(|_| parse_err(line, format!("invalid agent count `{count}`")))?,
        _ => return Err(parse_err(line, "expected `n <count>` header")),
    };
    let mut edges = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let [u, v] = tokens.as_slice() else {
            return Err(parse_err(line, format!("expected `u v`, got `{text}`")));
        };
        edges.push((line, parse_id(line, u)?, parse_id(line, v)?));
    }
    let mut g = Graph::empty(n);
    for (line, u, v) in edges {
        g = g
            .with_edges([(u, v)])
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Raw contents of a community file; not yet checked against a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommunityFile {
    pub communities: Vec<Vec<AgentId>>,
    pub malicious: Vec<AgentId>,
}

impl CommunityFile {
    pub fn into_layout(self, n: usize) -> Result<CommunityLayout, GraphError> {
        CommunityLayout::new(n, self.communities, self.malicious)
    }

    pub fn from_layout(layout: &CommunityLayout) -> Self {
        Self {
            communities: layout.communities().to_vec(),
            malicious: layout.malicious().collect(),
        }
    }
}

pub fn parse_communities(text: &str) -> Result<CommunityFile, GraphError> {
    let mut indexed: Vec<(usize, usize, Vec<AgentId>)> = Vec::new();
    let mut malicious: Option<Vec<AgentId>> = None;
    for (line, text) in content_lines(text) {
        let (key, ids) = text
            .split_once(':')
            .ok_or_else(|| parse_err(line, "expected `community <i>: ...` or `malicious: ...`"))?;
        let key: Vec<&str> = key.split_whitespace().collect();
        match key.as_slice() {
            ["malicious"] => {
                if malicious.is_some() {
                    return Err(parse_err(line, "duplicate `malicious` line"));
                }
                malicious = Some(parse_id_list(line, ids)?);
            }
            ["community", index] => {
                let index: usize = index
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid community index `{index}`")))?;
                indexed.push((index, line, parse_id_list(line, ids)?));
            }
            _ => return Err(parse_err(line, format!("unknown key `{}`", key.join(" ")))),
        }
    }
    indexed.sort_by_key(|(i, _, _)| *i);
    for (pos, (index, line, _)) in indexed.iter().enumerate() {
        if *index != pos + 1 {
            return Err(parse_err(
                *line,
                format!("community indices must be 1..c without gaps; found {index}"),
            ));
        }
    }
    Ok(CommunityFile {
        communities: indexed.into_iter().map(|(_, _, ids)| ids).collect(),
        malicious: malicious.unwrap_or_default(),
    })
}

fn join_ids(ids: &[AgentId]) -> String {
    ids.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_communities(file: &CommunityFile) -> String {
    let mut out = String::new();
    for (i, members) in file.communities.iter().enumerate() {
        let _ = writeln!(out, "community {}: {}", i + 1, join_ids(members));
    }
    let _ = writeln!(out, "malicious: {}", join_ids(&file.malicious));
    out
}
