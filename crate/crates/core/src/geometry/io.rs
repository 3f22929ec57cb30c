//! Readers and writers for contour (CSV, JSON) and mesh (OFF, OBJ, PLY)
//! files.
//!
//! All parse functions accept arbitrary input and report malformed data as
//! [`GeometryError`]; none of them panic. Writers emit the shortest decimal
//! representation of every coordinate, so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Contour, ContourFormat, GeometryError, MeshFormat, TriMesh, Vec2, Vec3};

/// Upper bound on element counts announced in file headers; protects against
/// absurd preallocation from corrupt headers.
const MAX_PREALLOC: usize = 1 << 16;

pub fn load_contour(path: &Path, format: Option<ContourFormat>) -> Result<Contour, GeometryError> {
    let format = match format {
        Some(f) => f,
        None => ContourFormat::from_path(path)?,
    };
    let text = std::fs::read_to_string(path)?;
    match format {
        ContourFormat::Csv => parse_contour_csv(&text),
        ContourFormat::Json => parse_contour_json(&text),
    }
}

pub fn save_contour(path: &Path, contour: &Contour) -> Result<(), GeometryError> {
    let text = match ContourFormat::from_path(path)? {
        ContourFormat::Csv => write_contour_csv(contour),
        ContourFormat::Json => write_contour_json(contour),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_mesh(path: &Path, format: Option<MeshFormat>) -> Result<TriMesh, GeometryError> {
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let bytes = std::fs::read(path)?;
    parse_mesh(&bytes, format)
}

pub fn save_mesh(path: &Path, mesh: &TriMesh) -> Result<(), GeometryError> {
    let text = match MeshFormat::from_path(path)? {
        MeshFormat::Off => write_off(mesh),
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Ply => write_ply(mesh),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn parse_mesh(bytes: &[u8], format: MeshFormat) -> Result<TriMesh, GeometryError> {
    match format {
        MeshFormat::Off => parse_off(utf8(bytes)?),
        MeshFormat::Obj => parse_obj(utf8(bytes)?),
        MeshFormat::Ply => parse_ply(bytes),
    }
}

fn utf8(bytes: &[u8]) -> Result<&str, GeometryError> {
    std::str::from_utf8(bytes).map_err(|e| GeometryError::parse(0, format!("invalid UTF-8: {e}")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, GeometryError> {
    let v: f64 =
        tok.trim().parse().map_err(|_| GeometryError::parse(line, format!("expected a number, found '{tok}'")))?;
    if !v.is_finite() {
        return Err(GeometryError::parse(line, format!("non-finite number '{tok}'")));
    }
    Ok(v)
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, GeometryError> {
    tok.trim()
        .parse()
        .map_err(|_| GeometryError::parse(line, format!("expected a non-negative integer, found '{tok}'")))
}

// ---------------------------------------------------------------- contours

/// One `x,y` pair per line; the contour is implicitly closed. Blank lines
/// and `#` comments are skipped, as is a non-numeric first line (header).
pub fn parse_contour_csv(text: &str) -> Result<Contour, GeometryError> {
    let points = parse_contour_csv_points(text)?;
    Contour::new(points, true)
}

pub(crate) fn parse_contour_csv_points(text: &str) -> Result<Vec<Vec2>, GeometryError> {
    let mut points = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let is_first = std::mem::replace(&mut first, false);
        if fields.len() != 2 {
            return Err(GeometryError::parse(idx + 1, format!("expected 'x,y', found '{line}'")));
        }
        match (parse_f64(fields[0], idx + 1), parse_f64(fields[1], idx + 1)) {
            (Ok(x), Ok(y)) => points.push(Vec2::new(x, y)),
            (Err(_), Err(_)) if is_first => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(points)
}

#[derive(Debug, Serialize, Deserialize)]
struct ContourJson {
    vertices: Vec<[f64; 2]>,
    #[serde(default = "default_closed")]
    closed: bool,
}

fn default_closed() -> bool {
    true
}

/// `{"vertices": [[x, y], ...], "closed": true}`; `closed` defaults to true.
pub fn parse_contour_json(text: &str) -> Result<Contour, GeometryError> {
    let doc: ContourJson = serde_json::from_str(text).map_err(|e| GeometryError::parse(e.line(), e.to_string()))?;
    let points = doc.vertices.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    Contour::new(points, doc.closed)
}

pub fn write_contour_csv(c: &Contour) -> String {
    let mut out = String::new();
    for p in c.vertices() {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out
}

pub fn write_contour_json(c: &Contour) -> String {
    let doc = ContourJson { vertices: c.vertices().iter().map(|p| [p.x, p.y]).collect(), closed: c.is_closed() };
    serde_json::to_string(&doc).expect("plain data serializes")
}

// -------------------------------------------------------------------- OFF

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse_off(text: &str) -> Result<TriMesh, GeometryError> {
    let (vertices, faces) = parse_off_raw(text)?;
    TriMesh::new(vertices, faces)
}

pub(crate) fn parse_off_raw(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), GeometryError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| GeometryError::parse(0, "empty OFF file"))?;
    let mut head_tokens = header.split_whitespace();
    let magic = head_tokens.next().unwrap_or("");
    if magic != "OFF" {
        return Err(GeometryError::parse(hline, format!("expected 'OFF' header, found '{magic}'")));
    }
    let mut counts: Vec<&str> = head_tokens.collect();
    let mut cline = hline;
    if counts.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| GeometryError::parse(hline, "missing OFF counts"))?;
        cline = l;
        counts = c.split_whitespace().collect();
    }
    if counts.len() < 2 {
        return Err(GeometryError::parse(cline, "expected vertex and face counts"));
    }
    let nv = parse_usize(counts[0], cline)?;
    let nf = parse_usize(counts[1], cline)?;

    let mut vertices = Vec::with_capacity(nv.min(MAX_PREALLOC));
    for _ in 0..nv {
        let (l, line) = lines.next().ok_or_else(|| GeometryError::parse(0, "unexpected end of vertex list"))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 3 {
            return Err(GeometryError::parse(l, "vertex needs 3 coordinates"));
        }
        vertices.push(Vec3::new(parse_f64(t[0], l)?, parse_f64(t[1], l)?, parse_f64(t[2], l)?));
    }
    let mut faces = Vec::with_capacity(nf.min(MAX_PREALLOC));
    for f in 0..nf {
        let (l, line) = lines.next().ok_or_else(|| GeometryError::parse(0, "unexpected end of face list"))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        let k = parse_usize(t[0], l)?;
        if k != 3 {
            return Err(GeometryError::NonTriangular { face: f, count: k });
        }
        if t.len() < 4 {
            return Err(GeometryError::parse(l, "face needs 3 indices"));
        }
        faces.push([parse_usize(t[1], l)?, parse_usize(t[2], l)?, parse_usize(t[3], l)?]);
    }
    Ok((vertices, faces))
}

pub fn write_off(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OFF\n{} {} {}", mesh.vertex_count(), mesh.face_count(), mesh.undirected_edge_count());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

// -------------------------------------------------------------------- OBJ

pub fn parse_obj(text: &str) -> Result<TriMesh, GeometryError> {
    let (vertices, faces) = parse_obj_raw(text)?;
    TriMesh::new(vertices, faces)
}

pub(crate) fn parse_obj_raw(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), GeometryError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (l, line) in content_lines(text) {
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(GeometryError::parse(l, "vertex needs 3 coordinates"));
                }
                vertices.push(Vec3::new(parse_f64(c[0], l)?, parse_f64(c[1], l)?, parse_f64(c[2], l)?));
            }
            Some("f") => {
                let refs: Vec<&str> = t.collect();
                if refs.len() != 3 {
                    return Err(GeometryError::NonTriangular { face: faces.len(), count: refs.len() });
                }
                let mut tri = [0usize; 3];
                for (slot, r) in tri.iter_mut().zip(&refs) {
                    let idx_tok = r.split('/').next().unwrap_or("");
                    let idx: i64 =
                        idx_tok.parse().map_err(|_| GeometryError::parse(l, format!("bad face index '{r}'")))?;
                    *slot = resolve_obj_index(idx, vertices.len())
                        .ok_or_else(|| GeometryError::parse(l, format!("face index {idx} out of range")))?;
                }
                faces.push(tri);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

fn resolve_obj_index(idx: i64, count: usize) -> Option<usize> {
    if idx > 0 {
        Some(idx as usize - 1)
    } else if idx < 0 {
        let back = idx.unsigned_abs() as usize;
        count.checked_sub(back)
    } else {
        None
    }
}

pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

// -------------------------------------------------------------------- PLY

#[derive(Debug, Clone, Copy, PartialEq)]
enum PlyEncoding {
    Ascii,
    BinaryLe,
    BinaryBe,
}

#[derive(Debug, Clone, Copy)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn decode(self, b: &[u8], big_endian: bool) -> f64 {
        macro_rules! rd {
            ($t:ty, $n:expr) => {{
                let mut a = [0u8; $n];
                a.copy_from_slice(&b[..$n]);
                if big_endian {
                    <$t>::from_be_bytes(a) as f64
                } else {
                    <$t>::from_le_bytes(a) as f64
                }
            }};
        }
        match self {
            Self::I8 => b[0] as i8 as f64,
            Self::U8 => b[0] as f64,
            Self::I16 => rd!(i16, 2),
            Self::U16 => rd!(u16, 2),
            Self::I32 => rd!(i32, 4),
            Self::U32 => rd!(u32, 4),
            Self::F32 => rd!(f32, 4),
            Self::F64 => rd!(f64, 8),
        }
    }
}

#[derive(Debug)]
enum PlyProperty {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

#[derive(Debug)]
struct PlyElement {
    name: String,
    count: usize,
    props: Vec<PlyProperty>,
}

pub fn parse_ply(bytes: &[u8]) -> Result<TriMesh, GeometryError> {
    let (vertices, faces) = parse_ply_raw(bytes)?;
    TriMesh::new(vertices, faces)
}

pub(crate) fn parse_ply_raw(bytes: &[u8]) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), GeometryError> {
    const END: &[u8] = b"end_header";
    let end =
        bytes.windows(END.len()).position(|w| w == END).ok_or_else(|| GeometryError::parse(0, "missing end_header"))?;
    let mut body_start = end + END.len();
    if bytes.get(body_start) == Some(&b'\r') {
        body_start += 1;
    }
    if bytes.get(body_start) == Some(&b'\n') {
        body_start += 1;
    }
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| GeometryError::parse(0, "PLY header is not UTF-8"))?;

    let mut lines = header.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(GeometryError::parse(1, "missing 'ply' magic")),
    }
    let mut encoding = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    for (i, raw) in lines {
        let l = i + 1;
        let t: Vec<&str> = raw.split_whitespace().collect();
        match t.first().copied() {
            Some("format") => {
                encoding = Some(match t.get(1).copied() {
                    Some("ascii") => PlyEncoding::Ascii,
                    Some("binary_little_endian") => PlyEncoding::BinaryLe,
                    Some("binary_big_endian") => PlyEncoding::BinaryBe,
                    other => return Err(GeometryError::parse(l, format!("unknown PLY format {other:?}"))),
                });
            }
            Some("element") => {
                if t.len() != 3 {
                    return Err(GeometryError::parse(l, "malformed element line"));
                }
                elements.push(PlyElement { name: t[1].to_string(), count: parse_usize(t[2], l)?, props: Vec::new() });
            }
            Some("property") => {
                let el = elements.last_mut().ok_or_else(|| GeometryError::parse(l, "property before element"))?;
                let bad = || GeometryError::parse(l, "malformed property line");
                if t.get(1) == Some(&"list") {
                    if t.len() != 5 {
                        return Err(bad());
                    }
                    let count = Scalar::parse(t[2]).ok_or_else(bad)?;
                    let item = Scalar::parse(t[3]).ok_or_else(bad)?;
                    el.props.push(PlyProperty::List { name: t[4].to_string(), count, item });
                } else {
                    if t.len() != 3 {
                        return Err(bad());
                    }
                    let ty = Scalar::parse(t[1]).ok_or_else(bad)?;
                    el.props.push(PlyProperty::Scalar { name: t[2].to_string(), ty });
                }
            }
            Some("comment") | Some("obj_info") | None => {}
            Some(other) => return Err(GeometryError::parse(l, format!("unexpected header keyword '{other}'"))),
        }
    }
    let encoding = encoding.ok_or_else(|| GeometryError::parse(0, "missing format line"))?;
    let body = &bytes[body_start..];
    let mut reader: Box<dyn PlyReader + '_> = match encoding {
        PlyEncoding::Ascii => Box::new(AsciiReader::new(utf8(body)?)),
        PlyEncoding::BinaryLe => Box::new(BinaryReader { data: body, pos: 0, big_endian: false }),
        PlyEncoding::BinaryBe => Box::new(BinaryReader { data: body, pos: 0, big_endian: true }),
    };

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for el in &elements {
        let xyz = ["x", "y", "z"]
            .map(|n| el.props.iter().position(|p| matches!(p, PlyProperty::Scalar { name, .. } if name == n)));
        let idx_prop = el.props.iter().position(
            |p| matches!(p, PlyProperty::List { name, .. } if name == "vertex_indices" || name == "vertex_index"),
        );
        let is_vertex = el.name == "vertex";
        let is_face = el.name == "face";
        if is_vertex && xyz.iter().any(Option::is_none) {
            return Err(GeometryError::parse(0, "vertex element lacks x/y/z"));
        }
        if is_face && idx_prop.is_none() {
            return Err(GeometryError::parse(0, "face element lacks vertex_indices"));
        }
        if el.props.is_empty() {
            continue;
        }
        if is_vertex {
            vertices.reserve(el.count.min(MAX_PREALLOC));
        }
        for _ in 0..el.count {
            reader.start_record()?;
            let mut coords = [0.0; 3];
            let mut tri = None;
            for (pi, prop) in el.props.iter().enumerate() {
                match prop {
                    PlyProperty::Scalar { ty, .. } => {
                        let v = reader.scalar(*ty)?;
                        for k in 0..3 {
                            if xyz[k] == Some(pi) {
                                coords[k] = v;
                            }
                        }
                    }
                    PlyProperty::List { count, item, .. } => {
                        let n = reader.scalar(*count)?;
                        if !(n >= 0.0) || n.fract() != 0.0 {
                            return Err(GeometryError::parse(0, "invalid list length"));
                        }
                        let n = n as usize;
                        let mut items = Vec::with_capacity(n.min(16));
                        for _ in 0..n {
                            items.push(reader.scalar(*item)?);
                        }
                        if is_face && idx_prop == Some(pi) {
                            if n != 3 {
                                return Err(GeometryError::NonTriangular { face: faces.len(), count: n });
                            }
                            let mut t = [0usize; 3];
                            for (slot, &v) in t.iter_mut().zip(&items) {
                                if !(v >= 0.0) || v.fract() != 0.0 || v > usize::MAX as f64 / 2.0 {
                                    return Err(GeometryError::parse(0, "invalid face index"));
                                }
                                *slot = v as usize;
                            }
                            tri = Some(t);
                        }
                    }
                }
            }
            if is_vertex {
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(GeometryError::parse(0, "non-finite vertex coordinate"));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            if let Some(t) = tri {
                faces.push(t);
            }
        }
    }
    Ok((vertices, faces))
}

trait PlyReader {
    fn start_record(&mut self) -> Result<(), GeometryError>;
    fn scalar(&mut self, ty: Scalar) -> Result<f64, GeometryError>;
}

struct AsciiReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    tokens: std::vec::IntoIter<&'a str>,
    line: usize,
}

impl<'a> AsciiReader<'a> {
    fn new(text: &'a str) -> Self {
        AsciiReader { lines: text.lines().enumerate(), tokens: Vec::new().into_iter(), line: 0 }
    }
}

impl PlyReader for AsciiReader<'_> {
    fn start_record(&mut self) -> Result<(), GeometryError> {
        loop {
            let (i, l) =
                self.lines.next().ok_or_else(|| GeometryError::parse(self.line, "unexpected end of PLY data"))?;
            self.line = i + 1;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if !toks.is_empty() {
                self.tokens = toks.into_iter();
                return Ok(());
            }
        }
    }

    fn scalar(&mut self, _ty: Scalar) -> Result<f64, GeometryError> {
        let tok = self.tokens.next().ok_or_else(|| GeometryError::parse(self.line, "record too short"))?;
        tok.parse::<f64>().map_err(|_| GeometryError::parse(self.line, format!("bad number '{tok}'")))
    }
}

struct BinaryReader<'a> {
    data: &'a [u8],
    pos: usize,
    big_endian: bool,
}

impl PlyReader for BinaryReader<'_> {
    fn start_record(&mut self) -> Result<(), GeometryError> {
        Ok(())
    }

    fn scalar(&mut self, ty: Scalar) -> Result<f64, GeometryError> {
        let n = ty.size();
        let chunk = self
            .data
            .get(self.pos..self.pos + n)
            .ok_or_else(|| GeometryError::parse(0, "unexpected end of binary PLY data"))?;
        self.pos += n;
        Ok(ty.decode(chunk, self.big_endian))
    }
}

pub fn write_ply(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertex_count(),
        mesh.face_count()
    );
    for p in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}
