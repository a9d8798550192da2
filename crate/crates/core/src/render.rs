//! Euclidean pictures of `Z_ℓ` coloured by the letter a cylinder carries.
//!
//! In the plane the cylinder `K_{t_0…t_r}` is the image of a regular ℓ-gon
//! under `f_{t_0} ∘ … ∘ f_{t_r}` with `f_t(x) = c x + (1 - c) v_t`, where the
//! `v_t` are the ℓ-gon vertices. On the line, digit `t` takes sub-interval
//! `t` of a Cantor-style split with gaps between the children.

use std::fmt::Write as _;

use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladic::{child_map, classify, CellLetter, LAdicAddress};
use crate::substitution::Substitution;
use crate::word::Letter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl std::str::FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Dimension::One),
            "2" => Ok(Dimension::Two),
            _ => Err(Error::Configuration(format!("dimension must be 1 or 2, got {s:?}"))),
        }
    }
}

/// Placement rule for the cylinders of `Z_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingSpec {
    pub dimension: Dimension,
    pub ell: u64,
    pub contraction: Rational64,
}

impl EmbeddingSpec {
    /// Regular ℓ-gon with contraction `3/10`.
    pub fn plane(ell: u64) -> Result<Self> {
        Self::new(Dimension::Two, ell, Rational64::new(3, 10))
    }

    /// Children fill every other slot of a `2ℓ - 1` split.
    pub fn line(ell: u64) -> Result<Self> {
        Self::new(Dimension::One, ell, Rational64::new(1, 2 * ell as i64 - 1))
    }

    pub fn default_for(dimension: Dimension, ell: u64) -> Result<Self> {
        match dimension {
            Dimension::One => Self::line(ell),
            Dimension::Two => Self::plane(ell),
        }
    }

    /// Rejects placements whose cylinders would touch. In the plane the
    /// ℓ-gon needs `3 <= ℓ <= 7`, `c < 1/3` and, for the larger ℓ, enough
    /// room between neighbouring vertices: `c < s/(1+s)` with `s = sin(π/ℓ)`.
    /// On the line children need `c < 1/ℓ`.
    pub fn new(dimension: Dimension, ell: u64, contraction: Rational64) -> Result<Self> {
        let c = contraction.to_f64().unwrap_or(f64::NAN);
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Configuration(format!("contraction {contraction} must lie in (0, 1)")));
        }
        match dimension {
            Dimension::Two => {
                if !(3..=7).contains(&ell) {
                    return Err(Error::Configuration(format!("a planar picture needs 3 <= ell <= 7, got {ell}")));
                }
                let s = (std::f64::consts::PI / ell as f64).sin();
                if contraction >= Rational64::new(1, 3) || c >= s / (1.0 + s) {
                    return Err(Error::Configuration(format!(
                        "contraction {contraction} is too large to keep the {ell} cells apart"
                    )));
                }
            }
            Dimension::One => {
                if ell < 2 {
                    return Err(Error::Configuration("a line picture needs ell >= 2".into()));
                }
                if contraction * ell as i64 >= Rational64::from(1) {
                    return Err(Error::Configuration(format!("contraction {contraction} must be below 1/{ell}")));
                }
            }
        }
        Ok(EmbeddingSpec { dimension, ell, contraction })
    }

    fn c(&self) -> f64 {
        self.contraction.to_f64().expect("finite contraction")
    }

    /// Anchor of digit `t`: an ℓ-gon vertex (vertex 0 on top, counter-clockwise)
    /// or the left end of the child interval.
    pub fn vertex(&self, t: u64) -> (f64, f64) {
        match self.dimension {
            Dimension::Two => {
                let a = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * t as f64 / self.ell as f64;
                (a.cos(), a.sin())
            }
            Dimension::One => (t as f64 * (1.0 - self.c()) / (self.ell - 1) as f64, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellGeometry {
    Polygon(Vec<(f64, f64)>),
    /// Sub-interval `[start, start + width]` of `[0, 1]`.
    Interval {
        start: f64,
        width: f64,
    },
}

/// Centre (plane) or left end (line) and scale of the cylinder.
pub fn embed_point(addr: &LAdicAddress, spec: &EmbeddingSpec) -> Result<((f64, f64), f64)> {
    if addr.ell != spec.ell {
        return Err(Error::Configuration(format!("address base {} but embedding base {}", addr.ell, spec.ell)));
    }
    let c = spec.c();
    let mut point = (0.0, 0.0);
    let mut scale = 1.0;
    for &t in &addr.digits {
        let v = spec.vertex(t);
        let w = match spec.dimension {
            Dimension::Two => (1.0 - c) * scale,
            Dimension::One => scale,
        };
        point = (point.0 + w * v.0, point.1 + w * v.1);
        scale *= c;
    }
    Ok((point, scale))
}

pub fn embed(addr: &LAdicAddress, spec: &EmbeddingSpec) -> Result<CellGeometry> {
    let ((x, y), scale) = embed_point(addr, spec)?;
    Ok(match spec.dimension {
        Dimension::Two => CellGeometry::Polygon(
            (0..spec.ell)
                .map(|t| {
                    let v = spec.vertex(t);
                    (x + scale * v.0, y + scale * v.1)
                })
                .collect(),
        ),
        Dimension::One => CellGeometry::Interval { start: x, width: scale },
    })
}

/// Fill colours as `#rrggbb`, one per letter, plus one for mixed cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorMap {
    pub letters: Vec<String>,
    pub mixed: String,
}

pub const MIXED_COLOR: &str = "#dddddd";

impl ColorMap {
    pub fn new(letters: Vec<String>, mixed: String) -> Result<Self> {
        let all: Vec<String> = letters.iter().chain([&mixed]).map(|c| c.to_ascii_lowercase()).collect();
        for c in &all {
            let ok = c.len() == 7 && c.starts_with('#') && c[1..].chars().all(|ch| ch.is_ascii_hexdigit());
            if !ok {
                return Err(Error::Configuration(format!("colour {c:?} is not of the form #rrggbb")));
            }
        }
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::Configuration("colours must be distinct".into()));
        }
        let mixed = all.last().cloned().expect("mixed colour");
        Ok(ColorMap { letters: all[..all.len() - 1].to_vec(), mixed })
    }

    /// Grey ramp from black to `#aaaaaa`; three letters get black, dark grey
    /// and light grey.
    pub fn greys(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Configuration("no letters to colour".into()));
        }
        if size > 171 {
            return Err(Error::Configuration(format!("{size} letters is too many for a grey ramp")));
        }
        let letters = (0..size)
            .map(|i| {
                let v = if size == 1 { 0 } else { (0xaa * i + (size - 1) / 2) / (size - 1) };
                format!("#{v:02x}{v:02x}{v:02x}")
            })
            .collect();
        ColorMap::new(letters, MIXED_COLOR.into())
    }

    pub fn color(&self, cell: CellLetter) -> &str {
        match cell {
            CellLetter::Single(x) => &self.letters[x.index()],
            CellLetter::Mixed => &self.mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub address: LAdicAddress,
    pub letter: CellLetter,
    pub geometry: CellGeometry,
}

/// Cells in depth-first address order. A cylinder is drawn as one shape as
/// soon as it carries a single letter; cylinders still mixed at `depth` are
/// drawn in the mixed colour.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendering {
    pub spec: EmbeddingSpec,
    pub depth: u32,
    pub labels: Vec<String>,
    pub colors: ColorMap,
    pub cells: Vec<Cell>,
}

pub fn render(sub: &Substitution, depth: u32, spec: &EmbeddingSpec, colors: &ColorMap) -> Result<Rendering> {
    let ell = sub.require_constant_length()? as u64;
    if depth == 0 {
        return Err(Error::Configuration("depth must be at least 1".into()));
    }
    if ell != spec.ell {
        return Err(Error::Configuration(format!("embedding base {} but substitution length {ell}", spec.ell)));
    }
    if colors.letters.len() != sub.size() {
        return Err(Error::Configuration(format!("{} colours for {} letters", colors.letters.len(), sub.size())));
    }
    let cells_bound = (ell as f64).powi(depth as i32);
    if cells_bound > 4e6 {
        return Err(Error::Configuration(format!("{ell}^{depth} cells is too many to draw")));
    }
    let mut cells = Vec::new();
    let root: Vec<Letter> = sub.alphabet().letters().collect();
    visit(sub, spec, depth, LAdicAddress::root(ell), root, &mut cells)?;
    Ok(Rendering { spec: *spec, depth, labels: sub.alphabet().labels().to_vec(), colors: colors.clone(), cells })
}

fn visit(
    sub: &Substitution,
    spec: &EmbeddingSpec,
    depth: u32,
    addr: LAdicAddress,
    phi: Vec<Letter>,
    out: &mut Vec<Cell>,
) -> Result<()> {
    let letter = classify(&phi);
    if letter != CellLetter::Mixed || addr.len() as u32 == depth {
        if !addr.is_empty() || letter != CellLetter::Mixed {
            out.push(Cell { geometry: embed(&addr, spec)?, address: addr, letter });
        }
        return Ok(());
    }
    for t in 0..spec.ell {
        let child = child_map(sub, &phi, t as usize);
        visit(sub, spec, depth, addr.child(t), child, out)?;
    }
    Ok(())
}

const PLANE_SIZE: f64 = 800.0;
const LINE_WIDTH: f64 = 1000.0;
const LINE_HEIGHT: f64 = 80.0;
const MARGIN: f64 = 20.0;

/// Six decimals, with `-0` written as `0`.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

impl Rendering {
    /// Haar measure covered by each letter, then by mixed cells.
    pub fn color_fractions(&self) -> (Vec<BigRational>, BigRational) {
        let mut letters = vec![BigRational::zero(); self.labels.len()];
        let mut mixed = BigRational::zero();
        for cell in &self.cells {
            let m = cell.address.measure();
            match cell.letter {
                CellLetter::Single(x) => letters[x.index()] += m,
                CellLetter::Mixed => mixed += m,
            }
        }
        (letters, mixed)
    }

    pub fn canvas(&self) -> (f64, f64) {
        match self.spec.dimension {
            Dimension::Two => (PLANE_SIZE, PLANE_SIZE),
            Dimension::One => (LINE_WIDTH, LINE_HEIGHT),
        }
    }

    /// Standalone SVG. `comment`, if given, is embedded verbatim (with `--`
    /// broken up) right after the root element.
    pub fn to_svg(&self, comment: Option<&str>) -> String {
        let (w, h) = self.canvas();
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
        );
        if let Some(c) = comment {
            let _ = writeln!(s, "<!-- {} -->", c.replace("--", "- -"));
        }
        let _ = writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");
        s.push_str("<g stroke=\"none\">\n");
        let half = (PLANE_SIZE - 2.0 * MARGIN) / 2.0;
        for cell in &self.cells {
            let fill = self.colors.color(cell.letter);
            let label = match cell.letter {
                CellLetter::Single(x) => self.labels[x.index()].as_str(),
                CellLetter::Mixed => "mixed",
            };
            let attrs =
                format!("fill=\"{fill}\" data-address=\"{}\" data-letter=\"{}\"", cell.address, xml_escape(label));
            match &cell.geometry {
                CellGeometry::Polygon(points) => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|&(x, y)| {
                            format!("{},{}", num(PLANE_SIZE / 2.0 + half * x), num(PLANE_SIZE / 2.0 - half * y))
                        })
                        .collect();
                    let _ = writeln!(s, "<polygon points=\"{}\" {attrs}/>", pts.join(" "));
                }
                CellGeometry::Interval { start, width } => {
                    let span = LINE_WIDTH - 2.0 * MARGIN;
                    let _ = writeln!(
                        s,
                        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {attrs}/>",
                        num(MARGIN + span * start),
                        num(MARGIN),
                        num(span * width),
                        num(LINE_HEIGHT - 2.0 * MARGIN)
                    );
                }
            }
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::theta_tilde;
    use crate::model_set::coset_decomposition;

    fn tt() -> Substitution {
        theta_tilde(2).unwrap().sub
    }

    #[test]
    fn spec_validation() {
        assert!(EmbeddingSpec::plane(3).is_ok());
        assert!(EmbeddingSpec::new(Dimension::Two, 3, Rational64::new(1, 3)).is_err());
        assert!(EmbeddingSpec::new(Dimension::Two, 2, Rational64::new(1, 4)).is_err());
        assert!(EmbeddingSpec::new(Dimension::Two, 8, Rational64::new(1, 4)).is_err());
        // sin(π/7)/(1 + sin(π/7)) is about 0.3026.
        assert!(EmbeddingSpec::new(Dimension::Two, 7, Rational64::new(3, 10)).is_ok());
        assert!(EmbeddingSpec::new(Dimension::Two, 7, Rational64::new(8, 25)).is_err());
        assert!(EmbeddingSpec::line(2).is_ok());
        assert!(EmbeddingSpec::new(Dimension::One, 3, Rational64::new(1, 3)).is_err());
        assert!(EmbeddingSpec::new(Dimension::One, 3, Rational64::new(0, 1)).is_err());
    }

    #[test]
    fn first_subdivision() {
        let spec = EmbeddingSpec::plane(3).unwrap();
        let ((x, y), scale) = embed_point(&LAdicAddress::new(3, vec![0]).unwrap(), &spec).unwrap();
        assert!((x - 0.0).abs() < 1e-12 && (y - 0.7).abs() < 1e-12 && (scale - 0.3).abs() < 1e-12);
        let line = EmbeddingSpec::line(3).unwrap();
        let g = embed(&LAdicAddress::new(3, vec![1, 2]).unwrap(), &line).unwrap();
        match g {
            CellGeometry::Interval { start, width } => {
                assert!((start - (2.0 / 5.0 + 4.0 / 25.0)).abs() < 1e-12);
                assert!((width - 1.0 / 25.0).abs() < 1e-12);
            }
            _ => panic!("expected an interval"),
        }
    }

    #[test]
    fn cells_are_separated() {
        for spec in [EmbeddingSpec::plane(3).unwrap(), EmbeddingSpec::plane(7).unwrap()] {
            for len in 1..=4u32 {
                if spec.ell == 7 && len > 3 {
                    continue;
                }
                let n = spec.ell.pow(len);
                let cells: Vec<_> = (0..n)
                    .map(|v| embed_point(&crate::ladic::hensel_digits(v, spec.ell, len - 1).unwrap(), &spec).unwrap())
                    .collect();
                for i in 0..cells.len() {
                    for j in i + 1..cells.len() {
                        let ((a, b), r) = cells[i];
                        let ((c, d), _) = cells[j];
                        assert!(((a - c).powi(2) + (b - d).powi(2)).sqrt() > 2.0 * r);
                    }
                }
            }
        }
    }

    #[test]
    fn depth_two_picture() {
        let s = tt();
        let r = render(&s, 2, &EmbeddingSpec::plane(3).unwrap(), &ColorMap::greys(3).unwrap()).unwrap();
        let singles: Vec<(String, String)> = r
            .cells
            .iter()
            .filter_map(|c| c.letter.letter().map(|x| (c.address.to_string(), s.label(x).to_string())))
            .collect();
        assert!(singles.contains(&("02".into(), "a1".into())));
        assert!(singles.contains(&("12".into(), "a2".into())));
        assert!(singles.contains(&("21".into(), "b1".into())));
        let svg = r.to_svg(Some("test"));
        assert!(svg.contains("fill=\"#000000\" data-address=\"02\" data-letter=\"a1\""));
        assert!(svg.contains("fill=\"#555555\" data-address=\"12\" data-letter=\"a2\""));
        assert!(svg.contains("fill=\"#aaaaaa\" data-address=\"21\" data-letter=\"b1\""));
        let again = render(&s, 2, &EmbeddingSpec::plane(3).unwrap(), &ColorMap::greys(3).unwrap()).unwrap();
        assert_eq!(svg, again.to_svg(Some("test")));
    }

    #[test]
    fn fractions_match_cosets() {
        let s = tt();
        for spec in [EmbeddingSpec::plane(3).unwrap(), EmbeddingSpec::line(3).unwrap()] {
            let r = render(&s, 4, &spec, &ColorMap::greys(3).unwrap()).unwrap();
            let (fr, mixed) = r.color_fractions();
            let mut total = mixed;
            for x in s.alphabet().letters() {
                assert_eq!(fr[x.index()], coset_decomposition(&s, x, 4).unwrap().covered_density);
                total += &fr[x.index()];
            }
            assert_eq!(total, BigRational::from_integer(1.into()));
        }
    }

    #[test]
    fn colours() {
        assert_eq!(ColorMap::greys(3).unwrap().letters, ["#000000", "#555555", "#aaaaaa"]);
        assert!(ColorMap::new(vec!["#000000".into(), "#000000".into()], MIXED_COLOR.into()).is_err());
        assert!(ColorMap::new(vec!["black".into()], MIXED_COLOR.into()).is_err());
        assert!(ColorMap::greys(0).is_err());
        assert_eq!(num(-0.0000001), "0.000000");
    }
}
