/// Parses `a:b:step` (inclusive of `b` up to rounding) or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number `{s}` in grid `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (number(a)?, number(b)?, number(step)?);
            if !a.is_finite() || !b.is_finite() || step.is_nan() || step <= 0.0 || b < a {
                return Err(format!("grid `{text}` needs a <= b and step > 0"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("grid `{text}` has too many points"));
            }
            Ok((0..count).map(|i| a + step * i as f64).collect())
        }
        [list] => {
            let values = list.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err("empty grid".into());
            }
            Ok(values)
        }
        _ => Err(format!("grid `{text}` is neither a:b:step nor a comma list")),
    }
}

pub fn parse_schedule(text: &str) -> Result<Vec<u32>, String> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| format!("bad n `{s}` in schedule `{text}`")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() || values[0] == 0 || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("schedule `{text}` must be strictly increasing positive integers"));
    }
    Ok(values)
}
