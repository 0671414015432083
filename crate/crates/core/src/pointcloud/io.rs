use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use log::warn;

use super::PointCloud;
use crate::error::{Error, Result};

/// On-disk point cloud formats.
///
/// `Xyz` is whitespace separated `x y z` per line with `#` comment lines.
/// `PlyAscii` is ASCII PLY 1.0 with `x`, `y`, `z` vertex properties; any other
/// vertex property is skipped with a warning. `Auto` sniffs the `ply` magic line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Xyz,
    PlyAscii,
    Auto,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xyz" => Ok(Format::Xyz),
            "ply" | "ply-ascii" => Ok(Format::PlyAscii),
            "auto" => Ok(Format::Auto),
            other => Err(Error::invalid(format!("unknown point cloud format '{other}'"))),
        }
    }
}

pub fn load(path: impl AsRef<Path>, format: Format) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Xyz => parse_xyz(&text),
        Format::PlyAscii => parse_ply(&text),
        Format::Auto => {
            let first = text.lines().map(str::trim).find(|l| !l.is_empty());
            if first == Some("ply") {
                parse_ply(&text)
            } else {
                parse_xyz(&text)
            }
        }
    }
}

/// Writes the cloud. `Format::Auto` picks PLY for a `.ply` extension and XYZ otherwise.
pub fn save(cloud: &PointCloud, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        Format::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ply") => Format::PlyAscii,
            _ => Format::Xyz,
        },
        f => f,
    };
    let text = match format {
        Format::PlyAscii => to_ply_string(cloud),
        _ => to_xyz_string(cloud),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_coord(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse '{token}' as a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite { line });
    }
    Ok(v)
}

pub fn parse_xyz(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 values, found {}", tokens.len()),
            });
        }
        let mut p = [0.0; 3];
        for (slot, tok) in p.iter_mut().zip(&tokens) {
            *slot = parse_coord(tok, line_no)?;
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::Empty);
    }
    PointCloud::from_points(&points)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
}

pub fn parse_ply(text: &str) -> Result<PointCloud> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    match lines.next() {
        Some((_, "ply")) => {}
        other => {
            return Err(Error::Parse {
                line: other.map_or(1, |(n, _)| n),
                message: "missing 'ply' magic line".into(),
            })
        }
    }

    let mut elements: Vec<PlyElement> = Vec::new();
    let mut saw_format = false;
    let mut header_done = false;
    for (line_no, line) in lines.by_ref() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                if tok.next() != Some("ascii") {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "only 'format ascii 1.0' is supported".into(),
                    });
                }
                saw_format = true;
            }
            Some("comment") | Some("obj_info") | None => {}
            Some("element") => {
                let name = tok.next().unwrap_or_default().to_string();
                let count = tok
                    .next()
                    .and_then(|c| c.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: "malformed element count".into(),
                    })?;
                elements.push(PlyElement {
                    name,
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements.last_mut().ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "property before any element".into(),
                })?;
                let parts: Vec<&str> = tok.collect();
                let name = parts.last().copied().unwrap_or_default().to_string();
                if parts.first() == Some(&"list") {
                    el.properties.push(format!("list:{name}"));
                } else {
                    el.properties.push(name);
                }
            }
            Some("end_header") => {
                header_done = true;
                break;
            }
            Some(other) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unexpected header keyword '{other}'"),
                })
            }
        }
    }
    if !saw_format || !header_done {
        return Err(Error::Parse {
            line: 1,
            message: "incomplete PLY header".into(),
        });
    }

    let mut points = Vec::new();
    let mut found_vertex = false;
    for el in &elements {
        if el.name != "vertex" {
            for _ in 0..el.count {
                lines.next();
            }
            continue;
        }
        found_vertex = true;
        let find = |axis: &str| el.properties.iter().position(|p| p == axis);
        let (ix, iy, iz) = match (find("x"), find("y"), find("z")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: "vertex element lacks x/y/z properties".into(),
                })
            }
        };
        let extra: Vec<&String> = el
            .properties
            .iter()
            .filter(|p| !matches!(p.as_str(), "x" | "y" | "z"))
            .collect();
        if !extra.is_empty() {
            warn!("ignoring PLY vertex properties {extra:?}");
        }
        for _ in 0..el.count {
            let (line_no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: text.lines().count(),
                message: "fewer vertex lines than declared".into(),
            })?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() < el.properties.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "expected {} values, found {}",
                        el.properties.len(),
                        tokens.len()
                    ),
                });
            }
            points.push([
                parse_coord(tokens[ix], line_no)?,
                parse_coord(tokens[iy], line_no)?,
                parse_coord(tokens[iz], line_no)?,
            ]);
        }
    }
    if !found_vertex || points.is_empty() {
        return Err(Error::Empty);
    }
    PointCloud::from_points(&points)
}

pub fn to_xyz_string(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 48);
    for [x, y, z] in cloud.points() {
        // `Display` for f64 prints the shortest string that parses back exactly.
        let _ = writeln!(out, "{x} {y} {z}");
    }
    out
}

pub fn to_ply_string(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 48 + 128);
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", cloud.len());
    out.push_str("property double x\nproperty double y\nproperty double z\nend_header\n");
    for [x, y, z] in cloud.points() {
        let _ = writeln!(out, "{x} {y} {z}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_points() {
        let c = parse_xyz("0 0 0\n1 2 3").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(0), [0.0, 0.0, 0.0]);
        assert_eq!(c.point(1), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let c = parse_xyz("# header\n\n 1 1 1 \n# tail\n").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn nan_reported_at_line() {
        match parse_xyz("0 0 nan") {
            Err(Error::NonFinite { line }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse_xyz("0 0 0\n1 inf 2") {
            Err(Error::NonFinite { line }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse_xyz("0 0 0\n\n1 2") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_xyz("1 2 abc") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        assert!(matches!(parse_xyz("# nothing\n"), Err(Error::Empty)));
    }

    #[test]
    fn ply_single_vertex() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n0.5 0.5 0.5\n";
        let c = parse_ply(text).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.point(0), [0.5, 0.5, 0.5]);
    }

    #[test]
    fn ply_extra_properties_and_faces() {
        let text = "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\nproperty float y\nproperty float intensity\nproperty float x\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n1 9 2 3\n4 9 5 6\n3 0 1 1\n";
        let c = parse_ply(text).unwrap();
        assert_eq!(c.point(0), [2.0, 1.0, 3.0]);
        assert_eq!(c.point(1), [5.0, 4.0, 6.0]);
    }

    #[test]
    fn ply_binary_rejected() {
        let text = "ply\nformat binary_little_endian 1.0\nelement vertex 1\nend_header\n";
        assert!(matches!(parse_ply(text), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn ply_truncated_body() {
        let text = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n";
        assert!(matches!(parse_ply(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn format_from_str() {
        assert_eq!("xyz".parse::<Format>().unwrap(), Format::Xyz);
        assert_eq!("ply-ascii".parse::<Format>().unwrap(), Format::PlyAscii);
        assert!("obj".parse::<Format>().is_err());
    }
}
