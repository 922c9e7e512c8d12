//! CSV column catalogue. `SCHEMA.md` is rendered from these tables.

pub struct Table {
    pub command: &'static str,
    pub file: &'static str,
    pub about: &'static str,
    pub columns: &'static [(&'static str, &'static str)],
}

const GRID_COLUMNS: [(&str, &str); 6] = [
    ("n", "space dimension"),
    ("alpha", "order of the fractional Laplacian"),
    ("s", "Hardy-Sobolev weight exponent"),
    ("gamma", "Hardy coupling"),
    ("N", "grid points per axis"),
    ("L", "box half-length"),
];

macro_rules! with_grid {
    ($($extra:expr),* $(,)?) => {
        &[
            GRID_COLUMNS[0], GRID_COLUMNS[1], GRID_COLUMNS[2],
            GRID_COLUMNS[3], GRID_COLUMNS[4], GRID_COLUMNS[5],
            $($extra),*
        ]
    };
}

pub const TABLES: &[Table] = &[
    Table {
        command: "hardy-constant",
        file: "hardy_constant.csv",
        about: "one row per requested alpha",
        columns: &[
            ("n", "space dimension"),
            ("alpha", "order of the fractional Laplacian"),
            ("gamma_h", "closed-form Hardy constant"),
            ("ratio", "minimized discrete Hardy ratio spectral/hardy (empty unless solver.minimize is set)"),
            ("ratio_over_gamma_h", "ratio / gamma_h (empty unless solver.minimize is set)"),
        ],
    },
    Table {
        command: "hardy-constant",
        file: "report.csv",
        about: "summary row",
        columns: &[
            ("n", "space dimension"),
            ("alphas", "requested alphas, `;`-separated"),
            ("gamma_h_min", "smallest gamma_h in the table"),
            ("gamma_h_max", "largest gamma_h in the table"),
        ],
    },
    Table {
        command: "quotient",
        file: "report.csv",
        about: "quotient and energy of a named profile",
        columns: with_grid![
            ("profile", "bubble, gaussian or random-smooth"),
            ("spectral", "seminorm squared of order alpha/2"),
            ("hardy", "integral of u^2 |x|^-alpha"),
            ("hs_term", "integral of |u|^(2*(s)) |x|^-s"),
            ("sob_term", "integral of |u|^(2*)"),
            ("quotient", "(spectral - gamma hardy) / hs_term^(2/2*(s))"),
            ("energy", "Psi(u)"),
            ("nehari_residual", "|Psi(u) - <Psi'(u), u>/2 - identity terms|"),
        ],
    },
    Table {
        command: "minimize",
        file: "report.csv",
        about: "final state of the quotient minimizer",
        columns: with_grid![
            ("status", "converged, max_iters or drift"),
            ("iterations", "descent steps performed"),
            ("quotient", "final quotient"),
            ("spectral", "final seminorm squared"),
            ("hardy", "final Hardy term"),
            ("hs_term", "final Hardy-Sobolev term (1 when renormalizing)"),
            ("sob_term", "final Sobolev term"),
            ("boundary_mass", "Hardy-Sobolev mass fraction in |x|_inf > L/2"),
        ],
    },
    Table {
        command: "minimize",
        file: "history.csv",
        about: "initial state, one row per descent step, and a last row when the final symmetrization is accepted",
        columns: &[
            ("iter", "iteration index"),
            ("quotient", "quotient after the step"),
            ("residual", "Sobolev-gradient norm of the quotient relative to |u|_M (NaN on the initial and symmetrization rows)"),
            ("boundary_mass", "Hardy-Sobolev mass fraction in |x|_inf > L/2"),
        ],
    },
    Table {
        command: "translate-scan",
        file: "scan.csv",
        about: "one row per shift along the first axis",
        columns: &[
            ("delta", "shift distance"),
            ("quotient", "quotient of the shifted field"),
            ("retained", "fraction of sum |u|^(2*) that stays in the box"),
        ],
    },
    Table {
        command: "translate-scan",
        file: "report.csv",
        about: "summary of the scan",
        columns: with_grid![
            ("source", "bubble or extremal"),
            ("shifts", "number of shifts scanned"),
            ("monotone_from", "index from which the quotient is non-increasing"),
            ("delta0", "shift at monotone_from"),
            ("final_quotient", "quotient at the largest shift"),
            ("reference", "quotient of the source at gamma = 0"),
            ("final_over_reference", "final_quotient / reference"),
        ],
    },
    Table {
        command: "mountain-pass",
        file: "report.csv",
        about: "summary of the mountain-pass run",
        columns: with_grid![
            ("converged", "residual below tol and c_est < c_star"),
            ("iterations", "deformation steps performed"),
            ("c_est", "maximum of Psi along the final path"),
            ("c_star", "compactness threshold from s0 and ss"),
            ("s0", "grid estimate of S(gamma, 0)"),
            ("ss", "grid estimate of S(gamma, s)"),
            ("ps_residual", "Sobolev-gradient norm at the maximizer"),
            ("relative_residual", "ps_residual / maximizer_norm"),
            ("nehari_pairing", "|<Psi'(u), u>| at the maximizer"),
            ("theta", "Sobolev mass in B_delta"),
            ("zeta", "Hardy-Sobolev mass in B_delta"),
            ("mu", "twisted energy density in B_delta"),
            ("positive_mass_fraction", "Hardy-Sobolev mass share of the positive part"),
            ("rho", "energy lower bound on the ring"),
            ("t0", "endpoint scale with negative energy"),
        ],
    },
    Table {
        command: "mountain-pass",
        file: "history.csv",
        about: "one row per deformation step",
        columns: &[
            ("iter", "step index"),
            ("energy", "path maximum after the step"),
            ("residual", "relative Sobolev-gradient residual"),
        ],
    },
    Table {
        command: "mountain-pass",
        file: "path.csv",
        about: "energy along the final path",
        columns: &[
            ("index", "path point index, 0 is the origin"),
            ("norm", "Sobolev-metric norm of the path point"),
            ("energy", "Psi at the path point"),
        ],
    },
    Table {
        command: "extension-check",
        file: "report.csv",
        about: "isometry check of the harmonic extension",
        columns: with_grid![
            ("profile", "bubble, gaussian or random-smooth"),
            ("levels", "vertical levels M"),
            ("height", "strip height"),
            ("seminorm_sq", "seminorm squared of the trace"),
            ("extension_energy", "weighted Dirichlet energy of the extension"),
            ("rel_err", "|extension_energy - seminorm_sq| / seminorm_sq"),
            ("trace_defect", "extension_energy minus seminorm_sq of the computed trace"),
            ("short_strip", "true when the strip truncates the slowest mode"),
        ],
    },
    Table {
        command: "extension-check",
        file: "profiles.csv",
        about: "mode profiles, written when solver.write_profiles is true",
        columns: &[
            ("xi_magnitude", "frequency |xi|"),
            ("y", "height of the level"),
            ("phi", "profile value phi(2 pi |xi| y)"),
        ],
    },
    Table {
        command: "minimize, mountain-pass",
        file: "field.csv / maximizer.csv",
        about: "one row per grid node; the same values are in the binary .fxv1 file",
        columns: &[
            ("x0 [, x1 [, x2]]", "node coordinates"),
            ("value", "field value"),
        ],
    },
    Table {
        command: "sweep",
        file: "sweep.csv",
        about: "one row per entry; axes are ordered by config path and the first varies slowest",
        columns: &[
            ("index", "entry index; outputs are in the zero-padded subdirectory"),
            ("<axis>", "one column per swept key, named by its config path"),
            ("exit_code", "0 success, 3 not converged, 1 runtime error"),
            ("<report columns>", "the report.csv columns of the swept command, empty on error"),
        ],
    },
];

/// Column names of `file` for `command`.
pub fn columns(command: &str, file: &str) -> Vec<&'static str> {
    TABLES
        .iter()
        .find(|t| t.command == command && t.file == file)
        .map(|t| t.columns.iter().map(|c| c.0).collect())
        .unwrap_or_else(|| panic!("no schema for {command}/{file}"))
}

pub fn render() -> String {
    let mut out = String::from("# Output schema\n\n");
    out.push_str(
        "Every run writes `report.json` (`\"report_version\": 1`, the resolved config, grid \
         metadata and the full result) and a single-row `report.csv`. Numbers in CSV files use \
         shortest round-trip scientific notation.\n",
    );
    for t in TABLES {
        let mut about = t.about.to_string();
        about[..1].make_ascii_uppercase();
        out.push_str(&format!("\n## `{}` ({})\n\n{about}.\n\n", t.file, t.command));
        out.push_str("| column | meaning |\n|---|---|\n");
        for (name, about) in t.columns {
            out.push_str(&format!("| `{name}` | {about} |\n"));
        }
    }
    out
}
