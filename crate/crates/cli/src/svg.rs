//! Minimal SVG scatter and line plots.

const W: f64 = 480.0;
const H: f64 = 480.0;
const PAD: f64 = 40.0;

pub struct Plot {
    title: String,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

fn f(v: f64) -> String {
    format!("{:.3}", v)
}

impl Plot {
    pub fn new(title: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        let fix = |r: (f64, f64)| if r.1 > r.0 { r } else { (r.0 - 1.0, r.0 + 1.0) };
        Self {
            title: title.to_string(),
            x: fix(x),
            y: fix(y),
            body: String::new(),
        }
    }

    /// Square plot window of half-width `r` around the origin.
    pub fn disk(title: &str, r: f64) -> Self {
        let mut p = Self::new(title, (-r, r), (-r, r));
        let (cx, cy) = p.map(0.0, 0.0);
        let (ex, _) = p.map(r, 0.0);
        p.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#999\"/>\n",
            f(cx),
            f(cy),
            f(ex - cx)
        ));
        p
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD);
        let sy = H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD);
        (sx, sy)
    }

    pub fn points(&mut self, pts: &[(f64, f64)], radius: f64, color: &str) {
        for &(x, y) in pts {
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            let (sx, sy) = self.map(x, y);
            self.body.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                f(sx),
                f(sy),
                f(radius),
                color
            ));
        }
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (sx, sy) = self.map(x, y);
                format!("{},{}", f(sx), f(sy))
            })
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>\n",
            coords.join(" "),
            color
        ));
        self.points(pts, 2.5, color);
    }

    pub fn render(&self, xlabel: &str, ylabel: &str) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        );
        s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        s.push_str(&format!(
            "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            W / 2.0,
            escape(&self.title)
        ));
        s.push_str(&format!(
            "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
            W - 2.0 * PAD,
            H - 2.0 * PAD
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{} [{}, {}]</text>\n",
            W / 2.0,
            H - 10.0,
            escape(xlabel),
            self.x.0,
            self.x.1
        ));
        s.push_str(&format!(
            "<text x=\"12\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{} [{}, {}]</text>\n",
            H / 2.0,
            H / 2.0,
            escape(ylabel),
            self.y.0,
            self.y.1
        ));
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
