//! Cycle diagrams: the resolution curves drawn as a closed polygon, each
//! node labelled with its self-intersection `−b_k`.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::atlas::AtlasRow;

const CELL: f64 = 220.0;

fn polygon(svg: &mut String, cx: f64, cy: f64, title: &str, cycle: &[i64]) {
    let r = CELL * 0.32;
    let n = cycle.len().max(1);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64 - PI / 2.0;
            (cx + r * t.cos(), cy + r * t.sin())
        })
        .collect();
    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    let _ = writeln!(
        svg,
        r##"<polygon points="{}" fill="none" stroke="#345" stroke-width="1.5"/>"##,
        path.join(" ")
    );
    for ((x, y), b) in pts.iter().zip(cycle) {
        let _ = writeln!(
            svg,
            r##"<circle cx="{x:.1}" cy="{y:.1}" r="11" fill="#fff" stroke="#345"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
            y + 3.5,
            -b
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{cx:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        cy + CELL * 0.45,
        title
    );
}

fn wrap(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"sans-serif\">\n{body}</svg>\n"
    )
}

pub fn cycle_svg(title: &str, cycle: &[i64]) -> String {
    let mut body = String::new();
    polygon(&mut body, CELL / 2.0, CELL / 2.0, title, cycle);
    wrap(CELL, CELL, &body)
}

pub fn atlas_svg(rows: &[AtlasRow]) -> String {
    let cols = 6usize;
    let drawn: Vec<&AtlasRow> = rows.iter().filter(|r| !r.cycle.is_empty()).collect();
    let mut body = String::new();
    for (i, r) in drawn.iter().enumerate() {
        let cx = CELL * ((i % cols) as f64 + 0.5);
        let cy = CELL * ((i / cols) as f64 + 0.5);
        polygon(
            &mut body,
            cx,
            cy,
            &format!("D={} class {}", r.d, r.class),
            &r.cycle,
        );
    }
    let nrows = drawn.len().div_ceil(cols).max(1);
    wrap(CELL * cols as f64, CELL * nrows as f64, &body)
}
