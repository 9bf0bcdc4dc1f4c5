// Wire types for the barometer API. The UI holds no statistical logic:
// every number shown comes from these payloads (or the percent recompute
// that mirrors the server's toggle semantics, pinned by shared fixtures).

export interface Tooltip {
  absolute: number | null;
  percent: number | null;
}

export interface ChartSeries {
  name: string;
  visible: boolean;
  values: Array<number | null>;
  tooltips: Tooltip[];
}

export interface DrilldownRoute {
  variable: number;
  filter: Record<string, string>;
}

export interface ChartSpec {
  variable: number;
  kind: string;
  title: string;
  unit: string | null;
  x_label: string;
  x_categories: string[];
  series: ChartSeries[];
  drilldown: Record<string, DrilldownRoute> | null;
  degenerate_columns: string[];
  provenance: Array<[string, number]>;
}

export interface RelatedVariable {
  number: number;
  title: string;
}

export interface RelatedDocument {
  label: string;
  url: string;
}

export interface VariableInfo {
  number: number;
  title: string;
  description: string;
  group: string;
  category: string;
  unit: string | null;
  default_chart: string;
  alternative_charts: string[];
  related_documents: RelatedDocument[];
  related_variables: RelatedVariable[];
}

export interface StatisticPayload {
  variable: VariableInfo;
  provenance: Array<[string, number]>;
  chart: ChartSpec;
}

export interface NavVariable {
  number: number;
  title: string;
}

export interface NavCategory {
  id: string;
  label: string;
  variables: NavVariable[];
}

export interface NavGroup {
  id: string;
  label: string;
  categories: NavCategory[];
}

export interface TablePayload {
  headers: string[];
  rows: Array<Array<string | number | null>>;
}
