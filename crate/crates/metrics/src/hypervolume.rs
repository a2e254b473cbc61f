//! Exact hypervolume of the region dominated by a point set and bounded
//! below by a reference point.
//!
//! Two dimensions use a sorted sweep. Higher dimensions slice along the last
//! objective: between consecutive distinct last-coordinate values the
//! dominated region is a prism whose base is the (D-1)-dimensional
//! hypervolume of the points above the slice.

use morl_core::ObjectiveVector;

use crate::error::check_dims;
use crate::Result;

/// Exact hypervolume of `points` against `reference`.
///
/// Points that are not strictly above the reference in every coordinate span
/// an empty box and contribute nothing.
pub fn hypervolume(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    let pts = clipped(points, reference)?;
    let r = reference.as_slice();
    Ok(match r.len() {
        1 => pts.iter().map(|p| p[0] - r[0]).fold(0.0, f64::max),
        2 => sweep_2d(pts, r),
        _ => slice(pts, r, Base::Sweep),
    })
}

/// Pure slicing down to one dimension, with no 2-D sweep at the bottom.
///
/// Used as an independent route to check [`hypervolume`].
pub fn hypervolume_by_slicing(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    let pts = clipped(points, reference)?;
    Ok(slice(pts, reference.as_slice(), Base::Linear))
}

/// Sorted-sweep hypervolume for two objectives.
pub fn hypervolume_sweep_2d(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    check_dims(2, reference.dim())?;
    let pts = clipped(points, reference)?;
    Ok(sweep_2d(pts, reference.as_slice()))
}

fn clipped(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        check_dims(p.dim(), reference.dim())?;
        if p.iter().zip(reference.iter()).all(|(v, r)| v > r) {
            out.push(p.as_slice().to_vec());
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Base {
    Sweep,
    Linear,
}

fn sweep_2d(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
    let mut area = 0.0;
    let mut covered_y = r[1];
    for p in &pts {
        if p[1] > covered_y {
            area += (p[0] - r[0]) * (p[1] - covered_y);
            covered_y = p[1];
        }
    }
    area
}

fn slice(mut pts: Vec<Vec<f64>>, r: &[f64], base: Base) -> f64 {
    let dim = r.len();
    if pts.is_empty() {
        return 0.0;
    }
    match (dim, base) {
        (1, _) => return pts.iter().map(|p| p[0] - r[0]).fold(0.0, f64::max),
        (2, Base::Sweep) => return sweep_2d(pts, r),
        _ => {}
    }
    let last = dim - 1;
    pts.sort_by(|a, b| b[last].total_cmp(&a[last]));
    let lower_ref = &r[..last];
    let mut volume = 0.0;
    let mut active: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        active.push(pts[i][..last].to_vec());
        let top = pts[i][last];
        let bottom = pts.get(i + 1).map_or(r[last], |p| p[last]);
        if top > bottom {
            volume += slice(active.clone(), lower_ref, base) * (top - bottom);
        }
    }
    volume
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_box() {
        assert_eq!(hypervolume(&[ov(&[1.0, 1.0])], &ov(&[0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(hypervolume(&[ov(&[1.0, 1.0, 1.0])], &ov(&[0.0, 0.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn two_overlapping_boxes() {
        let pts = [ov(&[1.0, 0.5]), ov(&[0.5, 1.0])];
        let r = ov(&[0.0, 0.0]);
        assert!((hypervolume(&pts, &r).unwrap() - 0.75).abs() < 1e-15);
        assert!((hypervolume_by_slicing(&pts, &r).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn points_below_reference_contribute_nothing() {
        let r = ov(&[0.0, 0.0, 0.0]);
        let pts = [ov(&[1.0, 1.0, -0.5]), ov(&[0.5, 0.5, 0.5])];
        assert!((hypervolume(&pts, &r).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(hypervolume(&[ov(&[0.0, 2.0])], &ov(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn three_d_inclusion_exclusion() {
        // Boxes [0,1]x[0,1]x[0,0.5] and [0,0.5]x[0,0.5]x[0,1]; overlap 0.5*0.5*0.5.
        let pts = [ov(&[1.0, 1.0, 0.5]), ov(&[0.5, 0.5, 1.0])];
        let v = hypervolume(&pts, &ov(&[0.0, 0.0, 0.0])).unwrap();
        assert!((v - (0.5 + 0.25 - 0.125)).abs() < 1e-15);
    }

    #[test]
    fn one_dimension() {
        let v = hypervolume(&[ov(&[0.3]), ov(&[0.7])], &ov(&[-0.1])).unwrap();
        assert!((v - 0.8).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(hypervolume(&[ov(&[1.0, 1.0])], &ov(&[0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn empty_front_has_zero_volume() {
        assert_eq!(hypervolume(&[], &ov(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
    }
}
