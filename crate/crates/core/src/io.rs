//! File formats: scene JSON/CSV, raster CSV and ESRI ASCII grids, GeoJSON
//! isolines, and decay-curve tables.
//!
//! Floats are written in Rust's shortest round-trip form, so every file
//! parses back to bit-identical values.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::isolines::{ContourSet, Isoline};
use crate::scene::{Amenity, GridSpec, Profile, Raster, Scene};

pub const NODATA: f64 = -9999.0;
pub const CRS_NOTE: &str = "planar scene coordinates; no CRS assumed";

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
    tmp.write_all(contents).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

// ---- scenes ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    amenities: Vec<Amenity>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    profiles: BTreeMap<String, ProfileFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    majority: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    efficiency: Option<f64>,
    #[serde(default)]
    overrides: BTreeMap<String, f64>,
}

pub fn parse_scene_json(text: &str, path: &str) -> Result<Scene> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| parse_err(path, e.to_string()))?;
    let profiles = file
        .profiles
        .into_iter()
        .map(|(name, p)| {
            let profile = Profile {
                name: name.clone(),
                efficiency: p.efficiency,
                overrides: p.overrides,
            };
            (name, profile)
        })
        .collect();
    Ok(Scene {
        amenities: file.amenities,
        profiles,
        majority: file.majority,
    })
}

/// Amenity table with header `id,x,y,A`.
pub fn parse_scene_csv(text: &str, path: &str) -> Result<Scene> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "x", "y", "A"] {
        return Err(parse_err(
            path,
            format!("line 1: expected header id,x,y,A, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut amenities = Vec::new();
    for row in reader.deserialize() {
        let a: Amenity = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(path, format!("line {line}: {e}"))
        })?;
        amenities.push(a);
    }
    Ok(Scene::new(amenities))
}

/// Reads a scene; `.csv` files are amenity tables, anything else is JSON.
pub fn load_scene(path: &Path) -> Result<Scene> {
    let text = read_text(path)?;
    let label = path.display().to_string();
    if has_extension(path, "csv") {
        parse_scene_csv(&text, &label)
    } else {
        parse_scene_json(&text, &label)
    }
}

pub fn scene_to_json(scene: &Scene) -> String {
    let file = SceneFile {
        amenities: scene.amenities.clone(),
        profiles: scene
            .profiles
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    ProfileFile {
                        efficiency: p.efficiency,
                        overrides: p.overrides.clone(),
                    },
                )
            })
            .collect(),
        majority: scene.majority.clone(),
    };
    serde_json::to_string_pretty(&file).expect("scene serializes") + "\n"
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

// ---- rasters ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    Csv,
    Asc,
}

impl RasterFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RasterFormat::Csv => "csv",
            RasterFormat::Asc => "asc",
        }
    }
}

pub fn write_raster(raster: &Raster, format: RasterFormat) -> String {
    match format {
        RasterFormat::Csv => raster_to_csv(raster),
        RasterFormat::Asc => raster_to_asc(raster),
    }
}

/// `# ncols,nrows,origin_x,origin_y,cell_size` then rows, top row first.
pub fn raster_to_csv(raster: &Raster) -> String {
    let g = raster.grid();
    let mut out = format!(
        "# {},{},{},{},{}\n",
        g.ncols,
        g.nrows,
        fmt_f64(g.origin_x),
        fmt_f64(g.origin_y),
        fmt_f64(g.cell_size)
    );
    for row in (0..g.nrows).rev() {
        let line: Vec<String> = (0..g.ncols).map(|c| fmt_f64(raster.get(c, row))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn parse_number<T: std::str::FromStr>(s: &str, path: &str, line: usize, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(path, format!("line {line}: invalid {what} {:?}", s.trim())))
}

pub fn parse_raster_csv(text: &str, path: &str) -> Result<Raster> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, "empty raster file"))?;
    let header = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| parse_err(path, "line 1: expected '# ncols,nrows,origin_x,origin_y,cell_size'"))?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() != 5 {
        return Err(parse_err(path, "line 1: header needs 5 fields"));
    }
    let ncols: usize = parse_number(fields[0], path, 1, "ncols")?;
    let nrows: usize = parse_number(fields[1], path, 1, "nrows")?;
    let grid = GridSpec::new(
        parse_number(fields[2], path, 1, "origin_x")?,
        parse_number(fields[3], path, 1, "origin_y")?,
        parse_number(fields[4], path, 1, "cell_size")?,
        ncols,
        nrows,
    )
    .map_err(|e| parse_err(path, format!("line 1: {e}")))?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(nrows);
    for (i, line) in lines {
        let row: Vec<f64> = line
            .split(',')
            .map(|s| parse_number(s, path, i + 1, "value"))
            .collect::<Result<_>>()?;
        if row.len() != ncols {
            return Err(parse_err(
                path,
                format!("line {}: expected {ncols} values, found {}", i + 1, row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != nrows {
        return Err(parse_err(path, format!("expected {nrows} rows, found {}", rows.len())));
    }
    rows.reverse();
    Raster::new(grid, rows.concat()).map_err(|e| parse_err(path, e.to_string()))
}

/// ESRI ASCII grid, rows top to bottom.
pub fn raster_to_asc(raster: &Raster) -> String {
    let g = raster.grid();
    let half = g.cell_size / 2.0;
    let mut out = format!(
        "NCOLS {}\nNROWS {}\nXLLCORNER {}\nYLLCORNER {}\nCELLSIZE {}\nNODATA_VALUE {}\n",
        g.ncols,
        g.nrows,
        fmt_f64(g.origin_x - half),
        fmt_f64(g.origin_y - half),
        fmt_f64(g.cell_size),
        NODATA
    );
    for row in (0..g.nrows).rev() {
        let line: Vec<String> = (0..g.ncols).map(|c| fmt_f64(raster.get(c, row))).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Reads an ESRI ASCII grid. Accepts corner or centre registration; cells
/// holding the NODATA value are rejected.
pub fn parse_raster_asc(text: &str, path: &str) -> Result<Raster> {
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, line)) = lines.peek() {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some(key), Some(value)) if key.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) => {
                header.insert(key.to_ascii_uppercase(), value.to_string());
                lines.next();
            }
            _ => break,
        }
    }
    let get = |k: &str| header.get(k).map(String::as_str);
    let need = |k: &str| get(k).ok_or_else(|| parse_err(path, format!("missing {k} header")));
    let ncols: usize = parse_number(need("NCOLS")?, path, 1, "NCOLS")?;
    let nrows: usize = parse_number(need("NROWS")?, path, 2, "NROWS")?;
    let cell: f64 = parse_number(need("CELLSIZE")?, path, 5, "CELLSIZE")?;
    let (ox, oy) = match (get("XLLCENTER"), get("YLLCENTER")) {
        (Some(x), Some(y)) => (parse_number(x, path, 3, "XLLCENTER")?, parse_number(y, path, 4, "YLLCENTER")?),
        _ => {
            let x: f64 = parse_number(need("XLLCORNER")?, path, 3, "XLLCORNER")?;
            let y: f64 = parse_number(need("YLLCORNER")?, path, 4, "YLLCORNER")?;
            (x + cell / 2.0, y + cell / 2.0)
        }
    };
    let nodata: Option<f64> = get("NODATA_VALUE")
        .map(|v| parse_number(v, path, 6, "NODATA_VALUE"))
        .transpose()?;
    let grid = GridSpec::new(ox, oy, cell, ncols, nrows).map_err(|e| parse_err(path, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(nrows);
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| parse_number(s, path, i + 1, "value"))
            .collect::<Result<_>>()?;
        if row.len() != ncols {
            return Err(parse_err(
                path,
                format!("line {}: expected {ncols} values, found {}", i + 1, row.len()),
            ));
        }
        if let Some(nd) = nodata {
            if row.contains(&nd) {
                return Err(parse_err(path, format!("line {}: NODATA cells are not supported", i + 1)));
            }
        }
        rows.push(row);
    }
    if rows.len() != nrows {
        return Err(parse_err(path, format!("expected {nrows} rows, found {}", rows.len())));
    }
    rows.reverse();
    Raster::new(grid, rows.concat()).map_err(|e| parse_err(path, e.to_string()))
}

/// Reads a raster; `.asc` files are ESRI grids, anything else raster CSV.
pub fn load_raster(path: &Path) -> Result<Raster> {
    let text = read_text(path)?;
    let label = path.display().to_string();
    if has_extension(path, "asc") {
        parse_raster_asc(&text, &label)
    } else {
        parse_raster_csv(&text, &label)
    }
}

// ---- isolines ----

/// FeatureCollection of LineString features carrying a `level` property.
pub fn contours_to_geojson(set: &ContourSet) -> String {
    let features: Vec<Value> = set
        .lines
        .iter()
        .map(|l| {
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": l.points.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>(),
                },
                "properties": {
                    "level": l.level,
                    "closed": l.closed,
                    "crs_note": CRS_NOTE,
                },
            })
        })
        .collect();
    let mut doc = json!({
        "type": "FeatureCollection",
        "levels": set.levels,
        "features": features,
    });
    if !set.warnings.is_empty() {
        doc["warnings"] = json!(set.warnings);
    }
    serde_json::to_string(&doc).expect("geojson serializes") + "\n"
}

pub fn parse_contours_geojson(text: &str, path: &str) -> Result<ContourSet> {
    let doc: Value = serde_json::from_str(text).map_err(|e| parse_err(path, e.to_string()))?;
    if doc["type"] != "FeatureCollection" {
        return Err(parse_err(path, "not a FeatureCollection"));
    }
    let num = |v: &Value, what: &str| {
        v.as_f64()
            .ok_or_else(|| parse_err(path, format!("{what} is not a number")))
    };
    let features = doc["features"]
        .as_array()
        .ok_or_else(|| parse_err(path, "missing features array"))?;
    let mut lines = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        if f["geometry"]["type"] != "LineString" {
            return Err(parse_err(path, format!("feature {i}: not a LineString")));
        }
        let coords = f["geometry"]["coordinates"]
            .as_array()
            .ok_or_else(|| parse_err(path, format!("feature {i}: missing coordinates")))?;
        let points = coords
            .iter()
            .map(|c| Ok((num(&c[0], "x")?, num(&c[1], "y")?)))
            .collect::<Result<Vec<_>>>()?;
        lines.push(Isoline {
            level: num(&f["properties"]["level"], "level")?,
            points,
            closed: f["properties"]["closed"].as_bool().unwrap_or(false),
        });
    }
    let levels = match doc["levels"].as_array() {
        Some(ls) => ls.iter().map(|v| num(v, "level")).collect::<Result<Vec<_>>>()?,
        None => {
            let mut ls: Vec<f64> = lines.iter().map(|l| l.level).collect();
            ls.dedup();
            ls
        }
    };
    let warnings = doc["warnings"]
        .as_array()
        .map(|w| w.iter().filter_map(|s| s.as_str().map(String::from)).collect())
        .unwrap_or_default();
    Ok(ContourSet {
        levels,
        lines,
        warnings,
    })
}
