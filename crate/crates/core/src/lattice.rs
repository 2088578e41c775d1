//! Lattice point enumeration helpers.

/// True when `n` is the chosen representative of the pair `{n, -n}`: its
/// first nonzero coordinate is positive.
pub fn is_half_representative(n: &[i64]) -> bool {
    n.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// All `n` with `0 < |n|_inf <= r` in lexicographic order.
pub fn box_points(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut n = vec![-r; d];
    if d == 0 || r < 0 {
        return out;
    }
    loop {
        if n.iter().any(|&x| x != 0) {
            out.push(n.clone());
        }
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if n[i] < r {
                n[i] += 1;
                break;
            }
            n[i] = -r;
        }
    }
}

/// One representative per `±n` pair of [`box_points`].
pub fn half_box_points(d: usize, r: i64) -> Vec<Vec<i64>> {
    box_points(d, r).into_iter().filter(|n| is_half_representative(n)).collect()
}

pub fn euclidean_norm(n: &[i64]) -> f64 {
    n.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

pub fn sup_norm(n: &[i64]) -> i64 {
    n.iter().map(|x| x.abs()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(box_points(2, 1).len(), 8);
        assert_eq!(half_box_points(2, 6).len(), 84);
        assert_eq!(half_box_points(1, 3), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(half_box_points(3, 2).len(), (125 - 1) / 2);
    }
}
