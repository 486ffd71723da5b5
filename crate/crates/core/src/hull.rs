//! Convex geometry in wrench space: origin containment by linear
//! feasibility, a 3-D quickhull, and the origin-centered inscribed-sphere
//! radius of a polytope given by its vertices.

use crate::scalar::{c, Real};

pub const CONTAINMENT_TOL: f64 = 1e-9;

#[inline]
fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn cross3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn norm3<T: Real>(a: [T; 3]) -> T {
    dot3(a, a).sqrt()
}

/// Tests whether the origin lies in the convex hull of `points`, i.e.
/// whether there are convex weights with zero weighted sum.
///
/// Solved as a phase-one simplex on `sum(lambda * p) = 0, sum(lambda) = 1,
/// lambda >= 0` with Bland's rule. Lower-dimensional hulls need no special
/// casing: the origin on a segment or polygon through it is feasible.
pub fn origin_in_convex_hull<T: Real>(points: &[[T; 3]]) -> bool {
    if points.is_empty() {
        return false;
    }
    let scale = points
        .iter()
        .map(|p| norm3(*p))
        .fold(T::zero(), |a, b| a.max(b));
    if scale == T::zero() {
        // All points are the origin itself.
        return true;
    }
    let n = points.len();
    let rows = 4;
    // Tableau columns: n lambdas, 4 artificials, rhs.
    let cols = n + rows + 1;
    let mut t = vec![T::zero(); rows * cols];
    let idx = |r: usize, col: usize| r * cols + col;
    for (j, p) in points.iter().enumerate() {
        t[idx(0, j)] = p[0] / scale;
        t[idx(1, j)] = p[1] / scale;
        t[idx(2, j)] = p[2] / scale;
        t[idx(3, j)] = T::one();
    }
    // rhs: zero wrench plus the convexity row.
    t[idx(3, cols - 1)] = T::one();
    // Flip rows so the rhs is non-negative (it already is) and install the
    // artificial basis.
    let mut basis = [0usize; 4];
    for r in 0..rows {
        t[idx(r, n + r)] = T::one();
        basis[r] = n + r;
    }
    // Phase-one objective: sum of artificials, reduced against the basis.
    let mut obj = vec![T::zero(); cols];
    for r in 0..rows {
        for col in 0..cols {
            obj[col] = obj[col] - t[idx(r, col)];
        }
    }
    for col in n..n + rows {
        obj[col] = obj[col] + T::one();
    }

    let tol = c::<T>(1e-12);
    for _ in 0..10_000 {
        // Bland's rule: first improving column.
        let mut pivot_col = None;
        for (col, &o) in obj.iter().enumerate().take(cols - 1) {
            if o < -tol {
                pivot_col = Some(col);
                break;
            }
        }
        let Some(pc) = pivot_col else { break };
        // Ratio test, smallest index on ties.
        let mut pivot_row = None;
        let mut best = T::infinity();
        for r in 0..rows {
            let a = t[idx(r, pc)];
            if a > tol {
                let ratio = t[idx(r, cols - 1)] / a;
                if ratio < best - tol {
                    best = ratio;
                    pivot_row = Some(r);
                }
            }
        }
        let Some(pr) = pivot_row else { break };
        // Pivot.
        let piv = t[idx(pr, pc)];
        for col in 0..cols {
            t[idx(pr, col)] = t[idx(pr, col)] / piv;
        }
        for r in 0..rows {
            if r != pr {
                let f = t[idx(r, pc)];
                if f != T::zero() {
                    for col in 0..cols {
                        t[idx(r, col)] = t[idx(r, col)] - f * t[idx(pr, col)];
                    }
                }
            }
        }
        let f = obj[pc];
        if f != T::zero() {
            for col in 0..cols {
                obj[col] = obj[col] - f * t[idx(pr, col)];
            }
        }
        basis[pr] = pc;
    }

    // Feasible iff the artificial mass is (numerically) zero.
    let mut infeasibility = T::zero();
    for r in 0..rows {
        if basis[r] >= n {
            infeasibility = infeasibility + t[idx(r, cols - 1)];
        }
    }
    infeasibility.abs() <= c(CONTAINMENT_TOL)
}

/// One oriented facet of a 3-D hull: unit outward normal and plane offset
/// (`normal . x = offset` on the plane, `<= offset` inside).
#[derive(Debug, Clone, Copy)]
pub struct Facet<T> {
    pub normal: [T; 3],
    pub offset: T,
    pub vertices: [usize; 3],
}

struct Face<T> {
    verts: [usize; 3],
    normal: [T; 3],
    offset: T,
    outside: Vec<usize>,
    alive: bool,
}

fn face_from<T: Real>(pts: &[[T; 3]], a: usize, b: usize, ci: usize, interior: [T; 3]) -> Face<T> {
    let mut n = cross3(sub3(pts[b], pts[a]), sub3(pts[ci], pts[a]));
    let ln = norm3(n);
    if ln > T::zero() {
        n = [n[0] / ln, n[1] / ln, n[2] / ln];
    }
    let mut verts = [a, b, ci];
    let mut offset = dot3(n, pts[a]);
    // Orient outward relative to the interior point.
    if dot3(n, interior) > offset {
        n = [-n[0], -n[1], -n[2]];
        offset = -offset;
        verts.swap(0, 1);
    }
    Face {
        verts,
        normal: n,
        offset,
        outside: Vec::new(),
        alive: true,
    }
}

/// Facets of the convex hull of `points`; `None` when the point set is
/// degenerate (fewer than 4 affinely independent points).
pub fn convex_hull_facets<T: Real>(points: &[[T; 3]]) -> Option<Vec<Facet<T>>> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let scale = points
        .iter()
        .map(|p| norm3(*p))
        .fold(T::zero(), |a, b| a.max(b))
        .max(T::one());
    let eps = c::<T>(1e-12) * scale;

    // Initial simplex: extremes along x, then farthest from the line, then
    // from the plane.
    let mut i0 = 0;
    let mut i1 = 0;
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[i0][0] {
            i0 = i;
        }
        if p[0] > points[i1][0] {
            i1 = i;
        }
    }
    if i0 == i1 {
        // x-degenerate; fall back to max pairwise along y.
        for (i, p) in points.iter().enumerate() {
            if p[1] < points[i0][1] {
                i0 = i;
            }
            if p[1] > points[i1][1] {
                i1 = i;
            }
        }
        if i0 == i1 {
            return None;
        }
    }
    let dir = sub3(points[i1], points[i0]);
    let mut i2 = usize::MAX;
    let mut best = eps;
    for (i, p) in points.iter().enumerate() {
        let d = norm3(cross3(dir, sub3(*p, points[i0])));
        if d > best {
            best = d;
            i2 = i;
        }
    }
    if i2 == usize::MAX {
        return None;
    }
    let plane_n = cross3(dir, sub3(points[i2], points[i0]));
    let mut i3 = usize::MAX;
    let mut best = eps;
    for (i, p) in points.iter().enumerate() {
        let d = dot3(plane_n, sub3(*p, points[i0])).abs() / norm3(plane_n).max(T::one());
        if d > best {
            best = d;
            i3 = i;
        }
    }
    if i3 == usize::MAX {
        return None;
    }

    let interior = {
        let mut s = [T::zero(); 3];
        for &i in &[i0, i1, i2, i3] {
            for k in 0..3 {
                s[k] = s[k] + points[i][k];
            }
        }
        [s[0] / c(4.0), s[1] / c(4.0), s[2] / c(4.0)]
    };

    let mut faces = vec![
        face_from(points, i0, i1, i2, interior),
        face_from(points, i0, i1, i3, interior),
        face_from(points, i0, i2, i3, interior),
        face_from(points, i1, i2, i3, interior),
    ];
    let assign = |face: &mut Face<T>, candidates: &[usize], pts: &[[T; 3]]| {
        for &ci in candidates {
            if dot3(face.normal, pts[ci]) - face.offset > eps {
                face.outside.push(ci);
            }
        }
    };
    let all: Vec<usize> = (0..n).collect();
    for f in &mut faces {
        assign(f, &all, points);
    }

    loop {
        // Face with the farthest outside point.
        let mut pick: Option<(usize, usize, T)> = None;
        for (fi, f) in faces.iter().enumerate() {
            if !f.alive {
                continue;
            }
            for &pi in &f.outside {
                let d = dot3(f.normal, points[pi]) - f.offset;
                if pick.map_or(true, |(_, _, bd)| d > bd) {
                    pick = Some((fi, pi, d));
                }
            }
        }
        let Some((_, apex, _)) = pick else { break };

        // Visible faces and their horizon edges.
        let mut visible = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.alive && dot3(f.normal, points[apex]) - f.offset > eps {
                visible.push(fi);
            }
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut candidates: Vec<usize> = Vec::new();
        for &fi in &visible {
            let v = faces[fi].verts;
            for e in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                // An edge is on the horizon if its mirrored twin is not in
                // any visible face.
                let twin_visible = visible.iter().any(|&gj| {
                    gj != fi && {
                        let g = faces[gj].verts;
                        let edges = [(g[0], g[1]), (g[1], g[2]), (g[2], g[0])];
                        edges.contains(&(e.1, e.0)) || edges.contains(&e)
                    }
                });
                if !twin_visible {
                    horizon.push(e);
                }
            }
            candidates.extend(faces[fi].outside.iter().copied());
            faces[fi].alive = false;
            faces[fi].outside.clear();
        }
        candidates.sort_unstable();
        candidates.dedup();
        for (a, b) in horizon {
            let mut f = face_from(points, a, b, apex, interior);
            assign(&mut f, &candidates, points);
            faces.push(f);
        }
        if faces.len() > 16 * n + 64 {
            // Numerical churn guard; treat the remaining faces as final.
            break;
        }
    }

    let facets: Vec<Facet<T>> = faces
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| Facet {
            normal: f.normal,
            offset: f.offset,
            vertices: f.verts,
        })
        .collect();
    if facets.len() < 4 {
        None
    } else {
        Some(facets)
    }
}

/// Radius of the largest origin-centered sphere inside the convex hull of
/// `vertices`: the minimum facet-plane distance when the origin is strictly
/// interior, otherwise zero (including all lower-dimensional hulls).
pub fn inscribed_radius<T: Real>(vertices: &[[T; 3]]) -> T {
    let Some(facets) = convex_hull_facets(vertices) else {
        return T::zero();
    };
    let scale = vertices
        .iter()
        .map(|p| norm3(*p))
        .fold(T::zero(), |a, b| a.max(b))
        .max(T::one());
    let mut r = T::infinity();
    for f in &facets {
        let n = norm3(f.normal);
        if n == T::zero() {
            return T::zero();
        }
        let d = f.offset / n;
        if d <= c::<T>(1e-12) * scale {
            return T::zero();
        }
        r = r.min(d);
    }
    if r.is_finite() {
        r
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn origin_on_segment_is_contained() {
        assert!(origin_in_convex_hull(&[[0.2f64, 0.0, 0.0], [-0.2, 0.0, 0.0]]));
    }

    #[test]
    fn one_sided_set_is_not_contained() {
        assert!(!origin_in_convex_hull(&[[0.2f64, 0.0, 0.0], [0.1, 0.05, 0.0]]));
    }

    #[test]
    fn tetrahedron_containment() {
        let pts = [
            [1.0f64, 1.0, 1.0],
            [-1.0, -1.0, 1.0],
            [-1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0],
        ];
        assert!(origin_in_convex_hull(&pts));
        let shifted: Vec<[f64; 3]> = pts.iter().map(|p| [p[0] + 3.0, p[1], p[2]]).collect();
        assert!(!origin_in_convex_hull(&shifted));
    }

    /// Caratheodory: the origin is in the hull iff it is in the hull of
    /// some subset of at most 4 points, checked by solving the small
    /// barycentric systems exactly.
    pub(crate) fn caratheodory_origin_in_hull(points: &[[f64; 3]]) -> bool {
        let n = points.len();
        let solve = |idx: &[usize]| -> bool {
            let m = idx.len();
            // Solve sum(l_i p_i) = 0, sum(l_i) = 1 by least squares on the
            // 4 x m system, then verify feasibility.
            let mut a = vec![[0.0f64; 5]; m.max(1)];
            let _ = &mut a;
            // Gaussian elimination on the (m x m) normal system.
            let mut ata = vec![vec![0.0; m]; m];
            let mut atb = vec![0.0; m];
            let row = |i: usize, r: usize| -> f64 {
                if r < 3 {
                    points[idx[i]][r]
                } else {
                    1.0
                }
            };
            for i in 0..m {
                for j in 0..m {
                    for r in 0..4 {
                        ata[i][j] += row(i, r) * row(j, r);
                    }
                }
                atb[i] += row(i, 3); // only the convexity row has nonzero rhs
            }
            // Solve ata x = atb.
            let mut mat = ata.clone();
            let mut rhs = atb.clone();
            for col in 0..m {
                let mut piv = col;
                for r in col + 1..m {
                    if mat[r][col].abs() > mat[piv][col].abs() {
                        piv = r;
                    }
                }
                if mat[piv][col].abs() < 1e-13 {
                    return false;
                }
                mat.swap(col, piv);
                rhs.swap(col, piv);
                for r in col + 1..m {
                    let f = mat[r][col] / mat[col][col];
                    for k in col..m {
                        mat[r][k] -= f * mat[col][k];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
            let mut x = vec![0.0; m];
            for col in (0..m).rev() {
                let mut s = rhs[col];
                for k in col + 1..m {
                    s -= mat[col][k] * x[k];
                }
                x[col] = s / mat[col][col];
            }
            // Verify the solution actually satisfies all equations.
            let mut sum = [0.0f64; 4];
            for i in 0..m {
                for r in 0..4 {
                    sum[r] += row(i, r) * x[i];
                }
            }
            let feasible = sum[0].abs() < 1e-8
                && sum[1].abs() < 1e-8
                && sum[2].abs() < 1e-8
                && (sum[3] - 1.0).abs() < 1e-8
                && x.iter().all(|&l| l >= -1e-9);
            feasible
        };
        // All subsets of size 1..=4.
        let mut stack = vec![(Vec::new(), 0usize)];
        while let Some((cur, start)) = stack.pop() {
            if !cur.is_empty() && solve(&cur) {
                return true;
            }
            if cur.len() < 4 {
                for i in start..n {
                    let mut nxt = cur.clone();
                    nxt.push(i);
                    stack.push((nxt, i + 1));
                }
            }
        }
        false
    }

    #[test]
    fn containment_matches_caratheodory_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1500 {
            let n = rng.gen_range(1..=8);
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    [
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    ]
                })
                .collect();
            assert_eq!(
                origin_in_convex_hull(&pts),
                caratheodory_origin_in_hull(&pts),
                "disagreement on {pts:?}"
            );
        }
    }

    #[test]
    fn octahedron_inscribed_radius() {
        let pts = [
            [1.0f64, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let r = inscribed_radius(&pts);
        assert!((r - 1.0 / 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cube_inscribed_radius() {
        let mut pts = Vec::new();
        for &x in &[-1.0f64, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        assert!((inscribed_radius(&pts) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn origin_outside_gives_zero_radius() {
        let pts = [
            [1.0f64, 1.0, 1.0],
            [2.0, 1.0, 1.0],
            [1.0, 2.0, 1.0],
            [1.0, 1.0, 2.0],
        ];
        assert_eq!(inscribed_radius(&pts), 0.0);
    }

    #[test]
    fn planar_set_gives_zero_radius() {
        let pts = [
            [1.0f64, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
        ];
        assert_eq!(inscribed_radius(&pts), 0.0);
    }

    /// Brute-force supporting-plane oracle: every triple that has all points
    /// on one side is a candidate facet plane.
    pub(crate) fn brute_force_inscribed_radius(pts: &[[f64; 3]]) -> f64 {
        let n = pts.len();
        let mut best = f64::INFINITY;
        let mut any = false;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = cross3(sub3(pts[j], pts[i]), sub3(pts[k], pts[i]));
                    let ln = norm3(nrm);
                    if ln < 1e-12 {
                        continue;
                    }
                    let nrm = [nrm[0] / ln, nrm[1] / ln, nrm[2] / ln];
                    let d = dot3(nrm, pts[i]);
                    let mut above = false;
                    let mut below = false;
                    for p in pts {
                        let s = dot3(nrm, *p) - d;
                        if s > 1e-10 {
                            above = true;
                        }
                        if s < -1e-10 {
                            below = true;
                        }
                    }
                    if above && below {
                        continue;
                    }
                    // Orient outward.
                    let d = if above { -d } else { d };
                    any = true;
                    if d <= 1e-12 {
                        return 0.0;
                    }
                    best = best.min(d);
                }
            }
        }
        if any && best.is_finite() {
            best
        } else {
            0.0
        }
    }

    #[test]
    fn inscribed_radius_matches_brute_force_on_random_polytopes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.gen_range(4..=10);
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    [
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    ]
                })
                .collect();
            let quick = inscribed_radius(&pts);
            let brute = brute_force_inscribed_radius(&pts);
            assert!(
                (quick - brute).abs() < 1e-8,
                "radius mismatch {quick} vs {brute} on {pts:?}"
            );
        }
    }
}
