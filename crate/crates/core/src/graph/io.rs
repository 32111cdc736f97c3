//! Graph files.
//!
//! JSON: `{"n": 4, "edges": [[0,1],[1,2]], "x": [..], "w": [[0,1,2.5]]}` with
//! `x` (one monomer weight per vertex) and `w` (dimer weights) optional.
//!
//! CSV: one `u,v[,w]` row per edge, header optional. The vertex count is one
//! more than the largest id, so isolated trailing vertices need JSON.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<Vec<(usize, usize, f64)>>,
}

pub fn read_json<R: Read>(reader: R) -> Result<Graph> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    let mut g = Graph::new(file.n, file.edges.iter().map(|e| (e[0], e[1])))?;
    if let Some(x) = file.x {
        g = g.with_vertex_weights(x)?;
    }
    if let Some(w) = file.w {
        g = g.with_edge_weight_list(&w)?;
    }
    Ok(g)
}

pub fn write_json<W: Write>(g: &Graph, writer: W) -> Result<()> {
    let file = GraphFile {
        n: g.vertex_count(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        x: g.vertex_weights().map(<[f64]>::to_vec),
        w: g
            .edge_weights()
            .map(|w| g.edges().iter().zip(w).map(|(&(u, v), &w)| (u, v, w)).collect()),
    };
    serde_json::to_writer(writer, &file)?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Graph> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() < 2 || record.len() > 3 {
            return Err(Error::Parse(format!("row {}: expected u,v[,w]", line + 1)));
        }
        let u = record[0].parse::<usize>();
        let v = record[1].parse::<usize>();
        let (u, v) = match (u, v) {
            (Ok(u), Ok(v)) => (u, v),
            _ if line == 0 => continue, // header
            _ => return Err(Error::Parse(format!("row {}: bad vertex id", line + 1))),
        };
        edges.push((u, v));
        if record.len() == 3 {
            let w = record[2]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
            weights.push((u, v, w));
        }
    }
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let g = Graph::new(n, edges)?;
    if weights.is_empty() {
        Ok(g)
    } else {
        g.with_edge_weight_list(&weights)
    }
}

pub fn write_csv<W: Write>(g: &Graph, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    match g.edge_weights() {
        Some(w) => {
            wtr.write_record(["u", "v", "w"])?;
            for (&(u, v), w) in g.edges().iter().zip(w) {
                wtr.write_record([u.to_string(), v.to_string(), w.to_string()])?;
            }
        }
        None => {
            wtr.write_record(["u", "v"])?;
            for &(u, v) in g.edges() {
                wtr.write_record([u.to_string(), v.to_string()])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a graph, choosing the format from the extension (`.json` or CSV otherwise).
pub fn read_path(path: &Path) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_json(file)
    } else {
        read_csv(file)
    }
}

pub fn write_path(g: &Graph, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        write_json(g, file)
    } else {
        write_csv(g, file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_with_weights() {
        let g = Graph::new(4, [(0, 1), (1, 2)])
            .unwrap()
            .with_vertex_weights(vec![1.0, 2.0, 0.5, 1.0])
            .unwrap()
            .with_edge_weight_list(&[(2, 1, 3.0)])
            .unwrap();
        let mut buf = Vec::new();
        write_json(&g, &mut buf).unwrap();
        let back = read_json(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_without_optional_fields() {
        let g = read_json(r#"{"n": 3, "edges": [[0,1],[1,2]]}"#.as_bytes()).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(!g.is_weighted());
        assert!(read_json(r#"{"n": 2, "edges": [[0,0]]}"#.as_bytes()).is_err());
        assert!(read_json(r#"{"n": 2, "edges": [[0,1]], "x": [1.0, -1.0]}"#.as_bytes()).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let g = read_csv("u,v\n0,1\n1,2\n".as_bytes()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        let g = read_csv("0,1,2.0\n1,2,0.5\n".as_bytes()).unwrap();
        assert_eq!(g.edge_weights().unwrap(), &[2.0, 0.5]);
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), g);
        assert!(read_csv("0,1\nx,2\n".as_bytes()).is_err());
    }
}
