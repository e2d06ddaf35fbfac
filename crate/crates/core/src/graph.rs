//! Line graph: lines meeting at smooth points are adjacent. Triangles,
//! stars, completely reducible planes and their configuration labels, and
//! the plane bound on the number of lines.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::gf3::FieldElement;
use crate::line_analysis::BoundCheck;
use crate::poly::MultiPoly;
use crate::proj::{lines_meet, plane_of, Line, Plane, ProjPoint};
use crate::solve::change_coords;
use crate::surface::{QuarticSurface, SurfaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line is not on the surface")]
    LineNotOnSurface,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("incomplete profiles: {0}")]
    IncompleteProfiles(String),
}

#[derive(Clone, Debug)]
pub struct Meet {
    pub a: usize,
    pub b: usize,
    pub point: ProjPoint,
    pub smooth: bool,
}

#[derive(Clone, Debug)]
pub struct LineGraph {
    pub vertices: Vec<Line>,
    /// Sorted neighbor lists (meetings at smooth points only).
    pub adjacency: Vec<Vec<usize>>,
    /// Every meeting pair, including meetings at singular points.
    pub meets: Vec<Meet>,
}

impl LineGraph {
    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adjacency.iter().map(|a| a.len()).collect()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }
}

pub fn build_graph(x: &QuarticSurface, lines: &[Line]) -> Result<LineGraph, GraphError> {
    if lines.iter().any(|l| !x.contains_line(l)) {
        return Err(GraphError::LineNotOnSurface);
    }
    let n = lines.len();
    let rows: Vec<Result<Vec<Meet>, GraphError>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in i + 1..n {
                let p = lines_meet(&lines[i], &lines[j]).map_err(|e| SurfaceError::Unsupported(e.to_string()))?;
                if let Some(point) = p {
                    let smooth = x.is_smooth_point(&point)?;
                    out.push(Meet { a: i, b: j, point, smooth });
                }
            }
            Ok(out)
        })
        .collect();
    let mut meets = Vec::new();
    for r in rows {
        meets.extend(r?);
    }
    let mut adjacency = vec![Vec::new(); n];
    for m in meets.iter().filter(|m| m.smooth) {
        adjacency[m.a].push(m.b);
        adjacency[m.b].push(m.a);
    }
    for a in adjacency.iter_mut() {
        a.sort_unstable();
    }
    Ok(LineGraph {
        vertices: lines.to_vec(),
        adjacency,
        meets,
    })
}

#[derive(Clone, Debug)]
pub struct Star {
    pub point: ProjPoint,
    pub lines: [usize; 4],
    pub plane: Plane,
}

#[derive(Clone, Debug)]
pub struct TrianglesStars {
    pub triangles: Vec<[usize; 3]>,
    /// Triangles whose lines are not coplanar (never expected).
    pub noncoplanar: usize,
    pub stars: Vec<Star>,
}

impl TrianglesStars {
    pub fn triangle_free(&self) -> bool {
        self.triangles.is_empty()
    }
}

pub fn find_triangles_stars(g: &LineGraph) -> TrianglesStars {
    let n = g.vertices.len();
    let triangles: Vec<[usize; 3]> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            for &j in g.adjacency[i].iter().filter(|&&j| j > i) {
                for &k in g.adjacency[j].iter().filter(|&&k| k > j) {
                    if g.adjacent(i, k) {
                        out.push([i, j, k]);
                    }
                }
            }
            out
        })
        .collect();
    let noncoplanar = triangles
        .iter()
        .filter(|t| {
            let v = &g.vertices;
            match plane_of(&v[t[0]], &v[t[1]]) {
                Some(p) => !p.contains_line(&v[t[2]]),
                None => true,
            }
        })
        .count();
    let mut through: BTreeMap<ProjPoint, Vec<usize>> = BTreeMap::new();
    for m in g.meets.iter().filter(|m| m.smooth) {
        let e = through.entry(m.point.clone()).or_default();
        e.push(m.a);
        e.push(m.b);
    }
    let mut stars = Vec::new();
    for (point, mut ls) in through {
        ls.sort_unstable();
        ls.dedup();
        if ls.len() < 4 {
            continue;
        }
        for a in 0..ls.len() {
            for b in a + 1..ls.len() {
                for c in b + 1..ls.len() {
                    for d in c + 1..ls.len() {
                        let q = [ls[a], ls[b], ls[c], ls[d]];
                        if let Some(plane) = plane_of(&g.vertices[q[0]], &g.vertices[q[1]]) {
                            if q[2..].iter().all(|&i| plane.contains_line(&g.vertices[i])) {
                                stars.push(Star { point: point.clone(), lines: q, plane });
                            }
                        }
                    }
                }
            }
        }
    }
    TrianglesStars {
        triangles,
        noncoplanar,
        stars,
    }
}

/// Label of a plane section made of lines with multiplicities summing to 4
/// that contains a triangle (three lines meeting pairwise at smooth
/// points): A0-A3 (general position, k singular points on one line),
/// B0-B3 (three concurrent lines and a transversal carrying k singular
/// points), C0 (star), D0 and E0 (a double line and two lines meeting off
/// or on it). None when there is no triangle or the pattern is different.
pub fn classify_configuration(lines: &[(Line, usize)], is_smooth: impl Fn(&ProjPoint) -> bool) -> Option<&'static str> {
    if lines.iter().map(|l| l.1).sum::<usize>() != 4 {
        return None;
    }
    let meet = |a: &Line, b: &Line| lines_meet(a, b).ok().flatten();
    let mults: Vec<usize> = lines.iter().map(|l| l.1).collect();
    match mults.len() {
        4 => {
            let l: Vec<&Line> = lines.iter().map(|x| &x.0).collect();
            let mut pts: Vec<((usize, usize), ProjPoint)> = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    pts.push(((i, j), meet(l[i], l[j])?));
                }
            }
            let on = |p: &ProjPoint, i: usize| l[i].contains_point(p.coords());
            let conc: Vec<usize> = (0..4).filter(|&i| on(&pts[0].1, i)).collect();
            if pts.iter().all(|p| p.1 == pts[0].1) {
                return is_smooth(&pts[0].1).then_some("C0");
            }
            // a point on three lines
            let triple = pts.iter().find(|p| (0..4).filter(|&i| on(&p.1, i)).count() == 3);
            let _ = conc;
            if let Some((_, o)) = triple {
                if !is_smooth(o) {
                    return None;
                }
                let t = (0..4).find(|&i| !on(o, i)).unwrap();
                let k = (0..4)
                    .filter(|&i| i != t)
                    .filter(|&i| !is_smooth(&meet(l[t], l[i]).unwrap()))
                    .count();
                return Some(["B0", "B1", "B2", "B3"][k]);
            }
            let sing: Vec<(usize, usize)> = pts.iter().filter(|p| !is_smooth(&p.1)).map(|p| p.0).collect();
            let has_triangle = (0..4).any(|skip| {
                let tri: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
                [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])].iter().all(|e| !sing.contains(e))
            });
            if !has_triangle {
                return None;
            }
            if sing.is_empty() {
                return Some("A0");
            }
            let common = (0..4).any(|i| sing.iter().all(|&(a, b)| a == i || b == i));
            common.then(|| ["A0", "A1", "A2", "A3"][sing.len()])
        }
        3 => {
            let d = mults.iter().position(|&m| m == 2)?;
            let others: Vec<&Line> = (0..3).filter(|&i| i != d).map(|i| &lines[i].0).collect();
            let ld = &lines[d].0;
            let p = meet(others[0], others[1])?;
            if ld.contains_point(p.coords()) {
                is_smooth(&p).then_some("E0")
            } else {
                let a = meet(ld, others[0])?;
                let b = meet(ld, others[1])?;
                (is_smooth(&p) && is_smooth(&a) && is_smooth(&b)).then_some("D0")
            }
        }
        _ => None,
    }
}

/// Multiplicity of a line in the plane section of the surface, or None when
/// the line does not lie in the plane.
fn section_multiplicities(x: &QuarticSurface, plane: &Plane, ls: &[Line]) -> Vec<usize> {
    let ctx = x.work_field();
    let k = crate::linalg::Matrix::from_rows(&[plane.coeffs().to_vec()]).kernel(ctx);
    // x = V y with the columns of V spanning the plane
    let mut v = crate::linalg::Matrix::zero(4, 4);
    for (j, col) in k.iter().enumerate() {
        for i in 0..4 {
            v.set(i, j, col[i]);
        }
    }
    let q = change_coords(x.form_w(), &v);
    let mut out = Vec::new();
    for l in ls {
        let eq = l
            .equations()
            .into_iter()
            .find(|e| {
                let m = crate::linalg::Matrix::from_rows(&[e.clone(), plane.coeffs().to_vec()]);
                m.rank(ctx) == 2
            })
            .expect("line equations span the plane pencil");
        let lin = MultiPoly::from_terms(
            ctx,
            q.vars().to_vec(),
            (0..3).map(|j| {
                let mut e = vec![0u16; 4];
                e[j] = 1;
                let c = (0..4).fold(FieldElement::ZERO, |acc, i| ctx.add(acc, ctx.mul(eq[i], k[j][i])));
                (e, c)
            }),
        );
        let mut rest = q.clone();
        let mut m = 0;
        while let Some(r) = rest.div_exact(&lin) {
            rest = r;
            m += 1;
            if rest.is_zero() {
                break;
            }
        }
        out.push(m);
    }
    out
}

#[derive(Clone, Debug)]
pub struct PlaneRecord {
    pub plane: Plane,
    /// Line indices with multiplicity in the plane section.
    pub lines: Vec<(usize, usize)>,
    pub label: Option<&'static str>,
}

/// Planes spanned by two meeting lines whose section is a union of lines
/// of the list (so exactly the completely reducible planes when the list
/// is complete).
pub fn completely_reducible_planes(x: &QuarticSurface, g: &LineGraph) -> Vec<PlaneRecord> {
    let mut planes: Vec<Plane> = g
        .meets
        .iter()
        .filter_map(|m| plane_of(&g.vertices[m.a], &g.vertices[m.b]))
        .collect();
    planes.sort();
    planes.dedup();
    let form = x.form_w().clone();
    let smooth = |p: &ProjPoint| (0..4).any(|i| !form.partial(i).eval(p.coords()).is_zero());
    planes
        .into_par_iter()
        .filter_map(|plane| {
            let idx: Vec<usize> = (0..g.vertices.len()).filter(|&i| plane.contains_line(&g.vertices[i])).collect();
            let ls: Vec<Line> = idx.iter().map(|&i| g.vertices[i].clone()).collect();
            let mults = section_multiplicities(x, &plane, &ls);
            if mults.iter().sum::<usize>() != 4 {
                return None;
            }
            let with: Vec<(Line, usize)> = ls.into_iter().zip(mults.iter().copied()).collect();
            let label = classify_configuration(&with, smooth);
            Some(PlaneRecord {
                plane,
                lines: idx.into_iter().zip(mults).collect(),
                label,
            })
        })
        .collect()
}

/// Right-hand side of the plane bound: lines in the plane, plus lines off
/// the plane through its singular points, plus for each line of the plane
/// its valency minus the lines of the plane it meets at smooth points.
pub fn phi_bound(x: &QuarticSurface, g: &LineGraph, rec: &PlaneRecord, valencies: &[Option<usize>]) -> Result<usize, GraphError> {
    let in_plane: Vec<usize> = rec.lines.iter().map(|l| l.0).collect();
    let mut total = in_plane.len();
    let sing: Vec<&ProjPoint> = x.singular_points().iter().filter(|p| rec.plane.contains_point(p.coords())).collect();
    let through = (0..g.vertices.len())
        .filter(|i| !in_plane.contains(i))
        .filter(|&i| sing.iter().any(|p| g.vertices[i].contains_point(p.coords())))
        .count();
    total += through;
    for &i in &in_plane {
        let v = valencies[i].ok_or_else(|| GraphError::IncompleteProfiles(format!("valency of line {i}")))?;
        let inner = g.adjacency[i].iter().filter(|j| in_plane.contains(j)).count();
        total += v - inner;
    }
    Ok(total)
}

/// Lines through each singular point of the surface, from the list.
pub fn lines_per_singular_point(x: &QuarticSurface, lines: &[Line]) -> Vec<(ProjPoint, usize)> {
    x.singular_points()
        .iter()
        .map(|p| (p.clone(), lines.iter().filter(|l| l.contains_point(p.coords())).count()))
        .collect()
}

/// Surface-level checks for a complete line list.
pub fn audit_surface(
    x: &QuarticSurface,
    g: &LineGraph,
    ts: &TrianglesStars,
    planes: &[PlaneRecord],
    valencies: &[Option<usize>],
) -> Result<Vec<BoundCheck>, GraphError> {
    let phi = g.vertices.len();
    let mut out = Vec::new();
    let chk = |rule: String, source: &'static str, value: usize, bound: usize, ok: bool| BoundCheck { rule, source, value, bound, ok };
    for (p, n) in lines_per_singular_point(x, &g.vertices) {
        out.push(chk(format!("lines through singular point {p}"), "Lemma 2.1", n, 8, n <= 8));
    }
    out.push(chk("112 lines or at most 67".into(), "Thm. 1", phi, 67, phi == 112 || phi <= 67));
    if !ts.stars.is_empty() {
        out.push(chk("star: 112 lines or at most 58".into(), "Prop. 5.4", phi, 58, phi == 112 || phi <= 58));
    }
    if ts.triangle_free() {
        out.push(chk("triangle free: at most 64 lines".into(), "Prop. 5.3", phi, 64, phi <= 64));
    }
    out.push(chk("triangles are coplanar".into(), "§2", ts.noncoplanar, 0, ts.noncoplanar == 0));
    let bad_stars = ts
        .stars
        .iter()
        .filter(|s| planes.iter().find(|r| r.plane == s.plane).and_then(|r| r.label) != Some("C0"))
        .count();
    out.push(chk("star planes are C0".into(), "§5", bad_stars, 0, bad_stars == 0));
    for rec in planes {
        let b = phi_bound(x, g, rec, valencies)?;
        out.push(chk(format!("lines <= plane bound for {}", rec.plane.to_literal()), "§2", phi, b, phi <= b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;
    use crate::poly::parse::parse_poly;

    fn fermat() -> QuarticSurface {
        let f = make_field(2).unwrap();
        QuarticSurface::new(&parse_poly(&f, "x0^4 + x1^4 + x2^4 + x3^4", &["x0", "x1", "x2", "x3"]).unwrap()).unwrap()
    }

    #[test]
    fn fermat_graph_is_30_regular() {
        let x = fermat();
        let lines = x.lines_bruteforce(2).unwrap();
        let g = build_graph(&x, &lines).unwrap();
        assert!(g.degree_sequence().iter().all(|&d| d == 30));
        let ts = find_triangles_stars(&g);
        assert_eq!(ts.noncoplanar, 0);
        assert!(!ts.stars.is_empty());
        let planes = completely_reducible_planes(&x, &g);
        let v: Vec<Option<usize>> = vec![Some(30); lines.len()];
        for s in &ts.stars {
            let rec = planes.iter().find(|r| r.plane == s.plane).unwrap();
            assert_eq!(rec.label, Some("C0"));
            assert_eq!(phi_bound(&x, &g, rec, &v).unwrap(), 112);
        }
        let audit = audit_surface(&x, &g, &ts, &planes, &v).unwrap();
        assert!(audit.iter().all(|c| c.ok));
    }

    #[test]
    fn skew_lines_are_not_adjacent() {
        let x = fermat();
        let lines = x.lines_bruteforce(2).unwrap();
        let g0 = build_graph(&x, &lines).unwrap();
        let i = 0;
        let j = (1..lines.len()).find(|&j| lines_meet(&lines[i], &lines[j]).unwrap().is_none()).unwrap();
        let g = build_graph(&x, &[lines[i].clone(), lines[j].clone()]).unwrap();
        assert!(g.adjacency.iter().all(|a| a.is_empty()));
        assert!(!g0.adjacent(i, j));
    }

    #[test]
    fn double_line_configuration() {
        let f = make_field(2).unwrap();
        let pt = |v: [i64; 4]| v.map(|c| f.from_int(c));
        let line = |a: [i64; 4], b: [i64; 4]| Line::from_rows(&f, &pt(a), &pt(b)).unwrap();
        // plane x3 = 0: L: x2 = 0 doubled, M: x0 = 0, N: x1 = 0
        let l = line([1, 0, 0, 0], [0, 1, 0, 0]);
        let m = line([0, 1, 0, 0], [0, 0, 1, 0]);
        let n = line([1, 0, 0, 0], [0, 0, 1, 0]);
        let marked = [ProjPoint::from_ints(&f, [1, 1, 0, 0]).unwrap()];
        let smooth = |p: &ProjPoint| !marked.contains(p);
        assert_eq!(classify_configuration(&[(l.clone(), 2), (m.clone(), 1), (n.clone(), 1)], smooth), Some("D0"));
        // M and N meeting on L
        let n2 = line([0, 1, 0, 0], [1, 0, 1, 0]);
        assert_eq!(classify_configuration(&[(l, 2), (m, 1), (n2, 1)], smooth), Some("E0"));
    }
}
