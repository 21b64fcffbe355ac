//! Newton polygons of power series with exact or lower-bound valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Q64 = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Exact,
    LowerBound,
}

/// (m, ord_q c_m); `value == None` means the coefficient is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NewtonPoint {
    pub m: usize,
    pub value: Option<Q64>,
    pub tag: Tag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub points: Vec<NewtonPoint>,
    pub vertices: Vec<NewtonPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Holds,
    Violated,
    Indeterminate,
}

/// ord_p(c) / a for a nonzero integer c.
pub fn ord_q_integer(c: &BigInt, p: u32, a: u32) -> Option<Q64> {
    if c.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut x = c.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        x = q;
        v += 1;
    }
    Some(Q64::new(v, a as i64))
}

/// Lower bound (1 - 1/(p-1)) m(m-1) on ord_q c_m.
pub fn proven_bound(p: u32, m: usize) -> Q64 {
    let m = m as i64;
    Q64::new((p as i64 - 2) * m * (m - 1), p as i64 - 1)
}

/// The heuristic m(m-1), reported but never asserted.
pub fn heuristic_bound(m: usize) -> Q64 {
    let m = m as i64;
    Q64::from_integer(m * (m - 1))
}

pub fn check_bound(pt: &NewtonPoint, bound: Q64) -> BoundStatus {
    match (pt.value, pt.tag) {
        (None, Tag::Exact) => BoundStatus::Holds,
        (None, Tag::LowerBound) => BoundStatus::Holds,
        (Some(v), _) if v >= bound => BoundStatus::Holds,
        (Some(_), Tag::Exact) => BoundStatus::Violated,
        (Some(_), Tag::LowerBound) => BoundStatus::Indeterminate,
    }
}

fn cross(o: &NewtonPoint, a: &NewtonPoint, b: &NewtonPoint) -> Q64 {
    let (ov, av, bv) = (o.value.unwrap(), a.value.unwrap(), b.value.unwrap());
    let ax = Q64::from_integer(a.m as i64 - o.m as i64);
    let bx = Q64::from_integer(b.m as i64 - o.m as i64);
    ax * (bv - ov) - (av - ov) * bx
}

/// Lower convex hull of the finite points. Lower-bound points enter the
/// hull at their bound, so the result is a lower bound for the true hull.
pub fn newton_polygon(points: &[NewtonPoint]) -> NewtonPolygon {
    let mut finite: Vec<NewtonPoint> = points.iter().filter(|p| p.value.is_some()).copied().collect();
    finite.sort_by_key(|p| p.m);
    let mut hull: Vec<NewtonPoint> = Vec::new();
    for pt in finite {
        while hull.len() >= 2 {
            let n = hull.len();
            if cross(&hull[n - 2], &hull[n - 1], &pt) <= Q64::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    NewtonPolygon {
        points: points.to_vec(),
        vertices: hull,
    }
}

impl NewtonPolygon {
    /// Slopes between consecutive vertices, strictly increasing.
    pub fn slopes(&self) -> Vec<(Q64, usize)> {
        self.vertices
            .windows(2)
            .map(|w| {
                let dx = (w[1].m - w[0].m) as i64;
                ((w[1].value.unwrap() - w[0].value.unwrap()) / dx, dx as usize)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,ord_q,tag,vertex\n");
        for pt in &self.points {
            let v = match pt.value {
                Some(v) => v.to_string(),
                None => "inf".to_string(),
            };
            let tag = match pt.tag {
                Tag::Exact => "exact",
                Tag::LowerBound => "lower-bound",
            };
            let vertex = self.vertices.iter().any(|x| x.m == pt.m);
            s.push_str(&format!("{},{},{},{}\n", pt.m, v, tag, vertex));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(m: usize, v: i64) -> NewtonPoint {
        NewtonPoint {
            m,
            value: Some(Q64::from_integer(v)),
            tag: Tag::Exact,
        }
    }

    #[test]
    fn hull_of_one_p_p4() {
        let np = newton_polygon(&[ex(0, 0), ex(1, 1), ex(2, 4)]);
        assert_eq!(np.vertices.len(), 3);
        let slopes: Vec<_> = np.slopes().into_iter().map(|s| s.0).collect();
        assert_eq!(slopes, vec![Q64::from_integer(1), Q64::from_integer(3)]);
    }

    #[test]
    fn zero_tail_ends_hull() {
        let zero = NewtonPoint {
            m: 3,
            value: None,
            tag: Tag::Exact,
        };
        let np = newton_polygon(&[ex(0, 0), ex(1, 2), ex(2, 1), zero]);
        assert_eq!(np.vertices.last().unwrap().m, 2);
        assert_eq!(np.vertices.len(), 2);
    }

    #[test]
    fn bound_statuses() {
        let b = proven_bound(5, 2);
        assert_eq!(b, Q64::new(3, 2));
        assert_eq!(check_bound(&ex(2, 2), b), BoundStatus::Holds);
        assert_eq!(check_bound(&ex(2, 1), b), BoundStatus::Violated);
        let lb = NewtonPoint {
            m: 2,
            value: Some(Q64::from_integer(1)),
            tag: Tag::LowerBound,
        };
        assert_eq!(check_bound(&lb, b), BoundStatus::Indeterminate);
    }
}
