//! On-disk formats.
//!
//! * point clouds: headerless CSV, one point per row
//! * graphs: an edge list (`u v` per line, whitespace or comma separated)
//!   plus an optional attribute CSV with a header row; a column named
//!   `vertex` supplies vertex labels used by the edge list
//! * signed measures: JSON `{"n": 2, "atoms": [[x, y, w], ...]}`
//! * filtered complexes: JSON `{"n", "vertex_count", "simplices", "values"}`
//! * Gram matrices and feature vectors: CSV
//!
//! Writers go through [`write_atomic`], so readers never observe a partial
//! file.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::SignedMeasure;
use crate::simplicial::{AttributedGraph, AxisSource, FilteredComplex, PointCloud, Simplex};
use crate::transport::GramMatrix;

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::parse(display(path), 0, e.to_string()))
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::param(format!("not a file path: {}", display(path))))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn parse_f64(path: &str, line: u64, field: &str) -> Result<f64> {
    let x: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("`{}` is not a number", field.trim())))?;
    if !x.is_finite() {
        return Err(Error::parse(path, line, format!("non-finite value `{}`", field.trim())));
    }
    Ok(x)
}

fn csv_reader(text: &str, headers: bool) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(path, line, e.to_string())
}

/// Parses a headerless CSV of coordinates.
pub fn parse_point_cloud(text: &str, path: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut dim = None;
    for record in csv_reader(text, false).records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| parse_f64(path, line, f))
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("expected {d} coordinates, found {}", row.len()),
                ))
            }
            _ => {}
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::parse(path, 0, "no points"));
    }
    PointCloud::new(points)
}

pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    parse_point_cloud(&read_text(path)?, &display(path))
}

/// Attribute table: column names, rows, and optional vertex labels.
struct AttributeTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

fn parse_attributes(text: &str, path: &str) -> Result<AttributeTable> {
    let mut reader = csv_reader(text, true);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let label_col = header.iter().position(|h| h == "vertex");
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_col)
        .map(|(_, h)| h.clone())
        .collect();
    if names.is_empty() {
        return Err(Error::parse(path, 1, "no attribute columns"));
    }
    let mut columns = vec![Vec::new(); names.len()];
    let mut labels = label_col.map(|_| Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::parse(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let mut c = 0;
        for (i, field) in record.iter().enumerate() {
            if Some(i) == label_col {
                labels.as_mut().unwrap().push(field.to_string());
            } else {
                columns[c].push(parse_f64(path, line, field)?);
                c += 1;
            }
        }
    }
    Ok(AttributeTable {
        names,
        columns,
        labels,
    })
}

/// Parses an edge list and, optionally, an attribute table.
///
/// Without a `vertex` column, edge endpoints are 0-based row indices of the
/// attribute table. With one, endpoints are matched against its labels.
pub fn parse_graph(
    edges: &str,
    edges_path: &str,
    attributes: Option<(&str, &str)>,
) -> Result<AttributedGraph> {
    let table = attributes
        .map(|(text, path)| parse_attributes(text, path))
        .transpose()?;
    let label_index: Option<HashMap<&str, u32>> = table.as_ref().and_then(|t| {
        t.labels
            .as_ref()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect())
    });
    let mut list = Vec::new();
    let mut max_vertex = None::<u32>;
    for (i, raw) in edges.lines().enumerate() {
        let line = i as u64 + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                edges_path,
                line,
                format!("expected two endpoints, found {}", fields.len()),
            ));
        }
        let mut ends = [0u32; 2];
        for (k, f) in fields.iter().enumerate() {
            ends[k] = match &label_index {
                Some(map) => *map.get(f).ok_or_else(|| {
                    Error::parse(edges_path, line, format!("unknown vertex label `{f}`"))
                })?,
                None => f.parse().map_err(|_| {
                    Error::parse(edges_path, line, format!("`{f}` is not a vertex index"))
                })?,
            };
        }
        if ends[0] == ends[1] {
            return Err(Error::parse(edges_path, line, "self-loop"));
        }
        max_vertex = max_vertex.max(Some(ends[0].max(ends[1])));
        list.push((ends[0], ends[1]));
    }
    let from_edges = max_vertex.map_or(0, |v| v as usize + 1);
    let vertex_count = match &table {
        Some(t) => {
            let rows = t.columns[0].len();
            if from_edges > rows {
                return Err(Error::parse(
                    attributes.unwrap().1,
                    0,
                    format!("edge list references vertex {} but only {rows} rows", from_edges - 1),
                ));
            }
            rows
        }
        None => from_edges,
    };
    let mut seen = std::collections::HashSet::new();
    list.retain(|&(u, v)| seen.insert((u.min(v), u.max(v))));
    let mut graph = AttributedGraph::new(vertex_count, list)?;
    if let Some(t) = table {
        for (name, col) in t.names.into_iter().zip(t.columns) {
            graph.set_attribute(name, col)?;
        }
    }
    Ok(graph)
}

pub fn read_graph(edges: &Path, attributes: Option<&Path>) -> Result<AttributedGraph> {
    let edge_text = read_text(edges)?;
    let attr = attributes
        .map(|p| Ok::<_, Error>((read_text(p)?, display(p))))
        .transpose()?;
    parse_graph(
        &edge_text,
        &display(edges),
        attr.as_ref().map(|(t, p)| (t.as_str(), p.as_str())),
    )
}

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    n: usize,
    atoms: Vec<Vec<f64>>,
}

pub fn measure_to_json(mu: &SignedMeasure) -> String {
    let doc = MeasureDoc {
        n: mu.n(),
        atoms: mu
            .atoms()
            .iter()
            .map(|(x, w)| x.iter().copied().chain([*w as f64]).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("measure serializes") + "\n"
}

pub fn measure_from_json(text: &str, path: &str) -> Result<SignedMeasure> {
    let doc: MeasureDoc = serde_json::from_str(text)
        .map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))?;
    let mut atoms = Vec::with_capacity(doc.atoms.len());
    for (i, a) in doc.atoms.into_iter().enumerate() {
        if a.len() != doc.n + 1 {
            return Err(Error::parse(
                path,
                0,
                format!("atom {i} has {} entries, expected {}", a.len(), doc.n + 1),
            ));
        }
        let w = a[doc.n];
        if w.fract() != 0.0 || w.abs() > (1u64 << 53) as f64 {
            return Err(Error::parse(path, 0, format!("atom {i} has non-integer weight {w}")));
        }
        atoms.push((a[..doc.n].to_vec(), w as i64));
    }
    SignedMeasure::new(doc.n, atoms)
}

pub fn write_measure(path: &Path, mu: &SignedMeasure) -> Result<()> {
    write_atomic(path, measure_to_json(mu).as_bytes())
}

pub fn read_measure(path: &Path) -> Result<SignedMeasure> {
    measure_from_json(&read_text(path)?, &display(path))
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    n: usize,
    vertex_count: usize,
    #[serde(default)]
    axes: Option<Vec<AxisSource>>,
    simplices: Vec<Simplex>,
    values: Vec<Vec<f64>>,
}

pub fn complex_to_json(c: &FilteredComplex) -> String {
    let doc = ComplexDoc {
        n: c.n_parameters(),
        vertex_count: c.vertex_count(),
        axes: Some(c.axes().to_vec()),
        simplices: c.simplices().to_vec(),
        values: c.values().iter().map(|v| v.0.clone()).collect(),
    };
    serde_json::to_string(&doc).expect("complex serializes") + "\n"
}

/// Parses and validates a complex file.
pub fn complex_from_json(text: &str, path: &str) -> Result<FilteredComplex> {
    let doc: ComplexDoc = serde_json::from_str(text)
        .map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))?;
    if doc.simplices.len() != doc.values.len() {
        return Err(Error::parse(
            path,
            0,
            format!(
                "{} simplices but {} filtration values",
                doc.simplices.len(),
                doc.values.len()
            ),
        ));
    }
    let entries = doc
        .simplices
        .into_iter()
        .zip(doc.values.into_iter().map(Into::into))
        .collect();
    let c = FilteredComplex::new(doc.n, doc.vertex_count, entries)?;
    match doc.axes {
        Some(axes) => c.with_axes(axes),
        None => Ok(c),
    }
}

pub fn write_complex(path: &Path, c: &FilteredComplex) -> Result<()> {
    write_atomic(path, complex_to_json(c).as_bytes())
}

pub fn read_complex(path: &Path) -> Result<FilteredComplex> {
    complex_from_json(&read_text(path)?, &display(path))
}

fn csv_bytes(rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory csv write");
    }
    w.into_inner().expect("in-memory csv flush")
}

/// Square matrix with a header row and a leading id column.
pub fn gram_to_csv(gram: &GramMatrix, ids: &[String]) -> Result<Vec<u8>> {
    if ids.len() != gram.size() {
        return Err(Error::LengthMismatch {
            what: "id list",
            expected: gram.size(),
            found: ids.len(),
        });
    }
    let header = std::iter::once("id".to_string()).chain(ids.iter().cloned()).collect();
    let rows = gram.rows().zip(ids).map(|(row, id)| {
        std::iter::once(id.clone())
            .chain(row.iter().map(|v| v.to_string()))
            .collect()
    });
    Ok(csv_bytes(std::iter::once(header).chain(rows)))
}

/// One row per sample: id followed by the feature values.
pub fn features_to_csv(rows: &[(String, Vec<f64>)]) -> Vec<u8> {
    let width = rows.first().map_or(0, |r| r.1.len());
    let header = std::iter::once("id".to_string())
        .chain((0..width).map(|i| format!("f{i}")))
        .collect();
    let body = rows.iter().map(|(id, v)| {
        std::iter::once(id.clone())
            .chain(v.iter().map(|x| x.to_string()))
            .collect()
    });
    csv_bytes(std::iter::once(header).chain(body))
}

/// Reads a feature CSV written by [`features_to_csv`].
pub fn features_from_csv(text: &str, path: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out = Vec::new();
    for record in csv_reader(text, true).records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut it = record.iter();
        let id = it.next().unwrap_or_default().to_string();
        let values = it.map(|f| parse_f64(path, line, f)).collect::<Result<_>>()?;
        out.push((id, values));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_cloud_parsing() {
        let pc = parse_point_cloud("0,0\n1, 2\n\n# comment\n3,4\n", "a.csv").unwrap();
        assert_eq!(pc.len(), 3);
        assert_eq!(pc.points()[1], vec![1.0, 2.0]);
    }

    #[test]
    fn malformed_row_names_file_and_line() {
        let e = parse_point_cloud("0,0\n1,x\n", "cloud.csv").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("cloud.csv") && msg.contains("line 2"), "{msg}");
        let e = parse_point_cloud("0,0\n1,2,3\n", "cloud.csv").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn graph_with_labels() {
        let attrs = "vertex,h,w\na,0.5,1\nb,1.5,2\nc,2.5,3\n";
        let g = parse_graph("a b\nb,c\n", "e.txt", Some((attrs, "v.csv"))).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.attribute("w").unwrap(), &[1.0, 2.0, 3.0]);
        assert!(parse_graph("a z\n", "e.txt", Some((attrs, "v.csv"))).is_err());
    }

    #[test]
    fn graph_without_attributes() {
        let g = parse_graph("0 1\n1 2\n# x\n2 0\n", "e.txt", None).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 3);
        let e = parse_graph("0 1\n1\n", "e.txt", None).unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn measure_round_trip() {
        let mu = SignedMeasure::new(2, [(vec![0.1, 2.0], 3), (vec![-1.0, 0.0], -3)]).unwrap();
        let back = measure_from_json(&measure_to_json(&mu), "m.json").unwrap();
        assert_eq!(back, mu);
        assert!(measure_from_json(r#"{"n":1,"atoms":[[0.0,0.5]]}"#, "m.json").is_err());
    }

    #[test]
    fn complex_round_trip() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let c = crate::simplicial::build_rips(&cloud, 5.0, 2).unwrap();
        let back = complex_from_json(&complex_to_json(&c), "c.json").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("mpsig-io-{}", std::process::id()));
        let p = dir.join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn feature_csv_round_trip() {
        let rows = vec![("s0".to_string(), vec![0.25, -1e-300]), ("s1".into(), vec![1.0, 2.0])];
        let text = String::from_utf8(features_to_csv(&rows)).unwrap();
        assert!(text.starts_with("id,f0,f1\n"));
        assert_eq!(features_from_csv(&text, "f.csv").unwrap(), rows);
    }
}
