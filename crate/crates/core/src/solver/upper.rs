use crate::func::FuncTable;

/// A `g` with `g + f` bijective and `V(g) <= q - V(f) + 1`.
///
/// The smallest point of every preimage class is sent to 0; the remaining
/// domain points, ascending, are paired with the values missed by `f`,
/// ascending, via `g(x) = y - f(x)`.
pub fn construct_upper_bound_g(f: &FuncTable) -> FuncTable {
    let q = f.order();
    let grp = f.group();
    let mut hit = vec![false; q];
    let mut rest = Vec::new();
    for x in 0..q {
        let b = f.get(x);
        if hit[b] {
            rest.push(x);
        } else {
            hit[b] = true;
        }
    }
    let missed = (0..q).filter(|&y| !hit[y]);
    let mut g = vec![0; q];
    for (x, y) in rest.into_iter().zip(missed) {
        g[x] = grp.sub(y, f.get(x));
    }
    FuncTable::new(grp.clone(), g).expect("values are group elements")
}
