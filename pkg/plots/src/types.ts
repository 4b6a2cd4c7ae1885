export interface SearchRecord {
  weights: number[];
  degree: number;
  verdict: string;
  step: number;
  priority: number;
  run_id: string;
  engine: string;
}

export interface RecordsFile {
  meta: Record<string, unknown>;
  records: SearchRecord[];
}

export interface HistogramRow {
  distance: number;
  count: number;
}

export interface RewardStepRow {
  engine: string;
  step: number;
  cumulative: number;
}

export interface Style {
  panelSize: number;
  margin: number;
  background: string;
  axis: string;
  colors: Record<string, string>;
  pointSize: number;
}

export const DEFAULT_STYLE: Style = {
  panelSize: 220,
  margin: 34,
  background: "#ffffff",
  axis: "#222222",
  colors: {
    terminal_qs: "#1f77b4",
    terminal_nonqs: "#d62728",
    other: "#999999",
    fixed: "#1f77b4",
    dynamic: "#d62728",
    bar: "#4a7fb5",
  },
  pointSize: 2.4,
};

export function mergeStyle(overrides: Partial<Style> | undefined): Style {
  if (!overrides) return { ...DEFAULT_STYLE, colors: { ...DEFAULT_STYLE.colors } };
  return {
    ...DEFAULT_STYLE,
    ...overrides,
    colors: { ...DEFAULT_STYLE.colors, ...(overrides.colors ?? {}) },
  };
}
