//! Deterministic SVG rendering: the target as a baseline at the bottom and,
//! above it, each segment's two alternative intervals as a stacked pair of
//! labeled bars. Coordinates scale rationals by a fixed pixels-per-unit and
//! are written as exact 6-digit decimals, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;

use segcover::instance::ScInstance;
use segcover::interval::Interval;
use segcover::rational::Rational;

const PX_PER_UNIT: i64 = 400;
const MARGIN_LEFT: i64 = 90;
const MARGIN_RIGHT: i64 = 20;
const MARGIN_TOP: i64 = 16;
const MARGIN_BOTTOM: i64 = 30;
const BAR_HEIGHT: i64 = 10;
const PAIR_GAP: i64 = 2;
const ROW_GAP: i64 = 10;
const BASELINE_GAP: i64 = 14;

const FIRST_FILL: &str = "#4c78a8";
const SECOND_FILL: &str = "#f58518";

fn px(value: &Rational) -> String {
    value.to_decimal_string(6)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Canvas<'a> {
    origin: &'a Rational,
}

impl Canvas<'_> {
    /// Horizontal pixel coordinate of a rational position on the line.
    fn x(&self, value: &Rational) -> Rational {
        (value - self.origin) * Rational::from_int(PX_PER_UNIT) + Rational::from_int(MARGIN_LEFT)
    }

    fn bar(&self, out: &mut String, interval: &Interval, y: i64, fill: &str) {
        let x0 = self.x(interval.lo());
        let w = interval.length() * Rational::from_int(PX_PER_UNIT);
        if w.is_zero() {
            // Degenerate alternative: a 2px tick centred on the point.
            let x = x0 - Rational::from_int(1);
            let _ = writeln!(
                out,
                "  <rect x=\"{}\" y=\"{y}\" width=\"2.000000\" height=\"{BAR_HEIGHT}\" fill=\"{fill}\"/>",
                px(&x)
            );
        } else {
            let _ = writeln!(
                out,
                "  <rect x=\"{}\" y=\"{y}\" width=\"{}\" height=\"{BAR_HEIGHT}\" fill=\"{fill}\" rx=\"1\"/>",
                px(&x0),
                px(&w)
            );
        }
    }
}

pub fn render(instance: &ScInstance) -> String {
    let target = instance.target();
    let canvas = Canvas {
        origin: target.lo(),
    };
    let pair_height = 2 * BAR_HEIGHT + PAIR_GAP;
    let rows_height = instance.num_segments() as i64 * (pair_height + ROW_GAP);
    let baseline_y = MARGIN_TOP + rows_height + BASELINE_GAP;
    let height = baseline_y + MARGIN_BOTTOM;
    let width = canvas.x(target.hi()) + Rational::from_int(MARGIN_RIGHT);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{height}\" viewBox=\"0 0 {w} {height}\" font-family=\"monospace\" font-size=\"10\">",
        w = px(&width)
    );

    for (i, seg) in instance.segments().iter().enumerate() {
        let y = MARGIN_TOP + i as i64 * (pair_height + ROW_GAP);
        let label_y = y + BAR_HEIGHT + PAIR_GAP / 2 + 3;
        let _ = writeln!(
            out,
            "  <text x=\"4\" y=\"{label_y}\" fill=\"#333\">{}</text>",
            escape(&seg.label)
        );
        canvas.bar(&mut out, &seg.first, y, FIRST_FILL);
        canvas.bar(&mut out, &seg.second, y + BAR_HEIGHT + PAIR_GAP, SECOND_FILL);
    }

    let x_lo = px(&canvas.x(target.lo()));
    let x_hi = px(&canvas.x(target.hi()));
    let _ = writeln!(
        out,
        "  <line x1=\"{x_lo}\" y1=\"{baseline_y}\" x2=\"{x_hi}\" y2=\"{baseline_y}\" stroke=\"#222\" stroke-width=\"2\"/>"
    );
    for (x, value) in [(x_lo, target.lo()), (x_hi, target.hi())] {
        let _ = writeln!(
            out,
            "  <line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#222\" stroke-width=\"1\"/>",
            baseline_y - 4,
            baseline_y + 4
        );
        let _ = writeln!(
            out,
            "  <text x=\"{x}\" y=\"{}\" fill=\"#333\" text-anchor=\"middle\">{}</text>",
            baseline_y + 16,
            escape(&value.to_string())
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use segcover::instance::UncertainSegment;
    use segcover::interval::ival;

    fn two_segment_instance() -> ScInstance {
        ScInstance::unit(vec![
            UncertainSegment::new(ival("0", "1/2"), ival("1/2", "1"), "a"),
            UncertainSegment::new(ival("0", "1"), ival("1/4", "1/4"), "b<c"),
        ])
        .unwrap()
    }

    #[test]
    fn renders_two_bars_per_segment_over_a_baseline() {
        let svg = render(&two_segment_instance());
        assert_eq!(svg.matches("<rect").count(), 4);
        assert_eq!(svg.matches("<line").count(), 3);
        assert!(svg.contains("width=\"200.000000\"")); // 1/2 unit at 400 px/unit
        assert!(svg.contains("b&lt;c"));
        assert!(svg.starts_with("<svg xmlns"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_instance_is_baseline_only() {
        let svg = render(&ScInstance::unit(vec![]).unwrap());
        assert_eq!(svg.matches("<rect").count(), 0);
        assert_eq!(svg.matches("<line").count(), 3);
    }

    #[test]
    fn identical_inputs_render_identically() {
        assert_eq!(render(&two_segment_instance()), render(&two_segment_instance()));
    }

    #[test]
    fn degenerate_alternative_renders_as_tick() {
        let svg = render(&two_segment_instance());
        // The [1/4, 1/4] point: centred tick at 90 + 100 - 1 = 189.
        assert!(svg.contains("x=\"189.000000\" y=\"60\" width=\"2.000000\""));
    }
}
