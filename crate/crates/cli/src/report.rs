//! The report document emitted by `polyk report`, in JSON and text form.

use std::fmt::Write as _;
use std::time::Duration;

use num_traits::ToPrimitive;
use polyk_core::ktheory::{E1Column, E2Entry, KGroups};
use polyk_core::{e1_page, Face, HomologyResult, KReport, Pipeline, Polytope};
use serde::{Deserialize, Serialize};

pub const TOOL: &str = "polyk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Sections {
    pub faces: bool,
    pub boundary: bool,
    pub homology: bool,
    pub ktheory: bool,
}

impl Sections {
    pub const ALL: Sections = Sections {
        faces: true,
        boundary: true,
        homology: true,
        ktheory: true,
    };

    /// No explicit section means all of them.
    pub fn or_all(self) -> Self {
        if self == Sections::default() {
            Sections::ALL
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceLevel {
    pub dim: i32,
    pub faces: Vec<Vec<usize>>,
}

/// D_j with rows labeled by (j−1)-faces and columns by j-faces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryBlock {
    pub j: usize,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySection {
    pub augmented: HomologyResult,
    pub reduced: HomologyResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTheorySection {
    pub e1: Vec<E1Column>,
    pub e2_algebra: Vec<E2Entry>,
    pub e2_quotient: Vec<E2Entry>,
    pub k_algebra: KGroups,
    pub k_quotient: KGroups,
    pub conclusions: Vec<String>,
    pub falsifications: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub pipeline_us: u64,
    pub report_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub input: InputEcho,
    pub f_vector: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<FaceLevel>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<BoundaryBlock>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<HomologySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ktheory: Option<KTheorySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

pub fn face_label(f: &Face) -> String {
    if f.dim < 0 {
        return "{}".into();
    }
    let inner: Vec<String> = f.vertices.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn echo(p: &Polytope) -> InputEcho {
    InputEcho {
        name: p.name().unwrap_or("unnamed").to_string(),
        dim: p.dim(),
        vertices: p
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| x.to_string()).collect())
            .collect(),
    }
}

impl ReportDocument {
    pub fn build(
        pipe: &Pipeline,
        report: &KReport,
        sections: Sections,
        timing: Option<Timing>,
    ) -> Self {
        let l = &pipe.lattice;
        let d = l.dim() as i32;
        let faces = sections.faces.then(|| {
            (-1..=d)
                .map(|j| FaceLevel {
                    dim: j,
                    faces: l.faces(j).iter().map(|f| f.vertices.clone()).collect(),
                })
                .collect()
        });
        let boundary = sections.boundary.then(|| {
            pipe.complex
                .boundaries()
                .iter()
                .enumerate()
                .map(|(j, m)| BoundaryBlock {
                    j,
                    rows: l.faces(j as i32 - 1).iter().map(face_label).collect(),
                    columns: l.faces(j as i32).iter().map(face_label).collect(),
                    entries: (0..m.rows())
                        .map(|r| {
                            (0..m.cols())
                                .map(|c| m[(r, c)].to_i64().expect("incidence entries are signs"))
                                .collect()
                        })
                        .collect(),
                })
                .collect()
        });
        let homology = sections.homology.then(|| HomologySection {
            augmented: report.augmented_homology.clone(),
            reduced: report.reduced_homology.clone(),
        });
        let ktheory = sections.ktheory.then(|| KTheorySection {
            e1: e1_page(l, &pipe.complex).columns,
            e2_algebra: report.e2_algebra.clone(),
            e2_quotient: report.e2_quotient.clone(),
            k_algebra: report.k_algebra.clone(),
            k_quotient: report.k_quotient.clone(),
            conclusions: report.conclusions.clone(),
            falsifications: report.falsifications.clone(),
        });
        ReportDocument {
            tool: TOOL.into(),
            version: VERSION.into(),
            input: echo(&pipe.polytope),
            f_vector: report.f_vector.clone(),
            faces,
            boundary,
            homology,
            ktheory,
            timing,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "{} {}", self.tool, self.version);
        let _ = writeln!(
            w,
            "polytope {} in dimension {}",
            self.input.name, self.input.dim
        );
        for (i, v) in self.input.vertices.iter().enumerate() {
            let _ = writeln!(w, "  v{i} = ({})", v.join(", "));
        }
        let f: Vec<String> = self.f_vector.iter().map(usize::to_string).collect();
        let _ = writeln!(w, "f-vector (f_-1..f_d): ({})", f.join(", "));

        if let Some(levels) = &self.faces {
            let _ = writeln!(w, "\nfaces");
            for lv in levels {
                let labels: Vec<String> = lv
                    .faces
                    .iter()
                    .map(|v| {
                        face_label(&Face {
                            vertices: v.clone(),
                            dim: lv.dim,
                        })
                    })
                    .collect();
                let _ = writeln!(w, "  dim {:>2}: {}", lv.dim, labels.join(" "));
            }
        }

        if let Some(blocks) = &self.boundary {
            let _ = writeln!(w, "\nboundary matrices");
            for b in blocks {
                let _ = writeln!(w, "  D_{} ({} x {})", b.j, b.rows.len(), b.columns.len());
                render_matrix(w, b);
            }
        }

        if let Some(h) = &self.homology {
            let _ = writeln!(w, "\nhomology");
            render_homology(w, "augmented", &h.augmented);
            render_homology(w, "plain", &h.reduced);
        }

        if let Some(k) = &self.ktheory {
            let _ = writeln!(w, "\nK-theory");
            let e1: Vec<String> =
                k.e1.iter()
                    .map(|c| format!("p={}: {}", c.p, c.odd))
                    .collect();
            let _ = writeln!(w, "  E1 (q odd): {}", e1.join(", "));
            let _ = writeln!(w, "  E2 of A_Omega: {}", render_page(&k.e2_algebra));
            let _ = writeln!(w, "  E2 of A_Omega/K: {}", render_page(&k.e2_quotient));
            let _ = writeln!(
                w,
                "  K_0(A_Omega) = {}, K_1(A_Omega) = {}",
                k.k_algebra.k0, k.k_algebra.k1
            );
            let _ = writeln!(
                w,
                "  K_0(A_Omega/K) = {}, K_1(A_Omega/K) = {}",
                k.k_quotient.k0, k.k_quotient.k1
            );
            for c in &k.conclusions {
                let _ = writeln!(w, "  - {c}");
            }
            for f in &k.falsifications {
                let _ = writeln!(w, "  ! {f}");
            }
        }

        if let Some(t) = &self.timing {
            let _ = writeln!(
                w,
                "\ntiming: pipeline {} us, report {} us",
                t.pipeline_us, t.report_us
            );
        }
        out
    }
}

fn render_matrix(w: &mut String, b: &BoundaryBlock) {
    if b.rows.is_empty() || b.columns.is_empty() {
        let _ = writeln!(w, "    (empty)");
        return;
    }
    let width = b.columns.iter().map(String::len).max().unwrap_or(1).max(2);
    let label_width = b.rows.iter().map(String::len).max().unwrap_or(2);
    let _ = write!(w, "    {:label_width$}", "");
    for c in &b.columns {
        let _ = write!(w, " {c:>width$}");
    }
    let _ = writeln!(w);
    for (r, row) in b.rows.iter().zip(&b.entries) {
        let _ = write!(w, "    {r:label_width$}");
        for x in row {
            let _ = write!(w, " {x:>width$}");
        }
        let _ = writeln!(w);
    }
}

fn render_homology(w: &mut String, label: &str, h: &HomologyResult) {
    let parts: Vec<String> = h
        .groups
        .iter()
        .map(|g| format!("H_{} = {}", g.degree, g.group))
        .collect();
    let _ = writeln!(w, "  {label}: {}", parts.join(", "));
}

fn render_page(entries: &[E2Entry]) -> String {
    if entries.is_empty() {
        return "0".into();
    }
    entries
        .iter()
        .map(|e| format!("({}, odd) = {}", e.p, e.group))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn micros(d: Duration) -> u64 {
    d.as_micros().min(u64::MAX as u128) as u64
}
