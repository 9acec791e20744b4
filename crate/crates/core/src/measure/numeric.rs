/// Neumaier-compensated summation.
///
/// Distributions over hundreds of thousands of atoms must still normalize to
/// within `1e-12`, which naive left-to-right summation does not guarantee.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
