/** Service JSON contract. Field names mirror the backend verbatim. */

export const OBJECTIVE_NAMES = [
  "subset_size",
  "balanced_accuracy",
  "f1_score",
  "vif",
  "statistical_parity",
  "equalised_odds",
] as const;

export type ObjectiveName = (typeof OBJECTIVE_NAMES)[number];

/** Optimization direction per objective; "min" columns read best-low. */
export const DIRECTIONS: Record<ObjectiveName, "min" | "max"> = {
  subset_size: "min",
  balanced_accuracy: "max",
  f1_score: "max",
  vif: "min",
  statistical_parity: "max",
  equalised_odds: "max",
};

export const OBJECTIVE_LABELS: Record<ObjectiveName, string> = {
  subset_size: "Subset size",
  balanced_accuracy: "Balanced accuracy",
  f1_score: "F1 score",
  vif: "VIF",
  statistical_parity: "Statistical parity",
  equalised_odds: "Equalised odds",
};

export interface SolutionEntry {
  id: number;
  mask: number[];
  objectives: Record<ObjectiveName, number>;
  cluster: number;
  pca: [number, number];
  ps: number;
  rank: number;
}

export interface ReportDoc {
  solutions: SolutionEntry[];
  weights: Record<string, { values: number[]; objective_rank: string[] }>;
  elbow: { k: number; wcss: number[] };
  frequency: number[];
  contribution: { solution_id: number; values: number[]; samples: number };
  sensitivity: {
    schemes: string[];
    top: Record<string, number[]>;
    overlap: { a: string; b: string; size: number }[];
  };
  provenance: Record<string, unknown> & { feature_names: string[] };
}

export interface RankResult {
  id: number;
  ps: number;
  rank: number;
}

export interface RankResponse {
  scheme: string;
  weights: number[];
  results: RankResult[];
  excluded: number[];
}

export interface RunSummary {
  run_id: string;
  status: "Pending" | "Running" | "Done" | "Failed";
  classifier: string;
  config: Record<string, number>;
  dataset: Record<string, unknown>;
  progress: { evaluations_done: number; max_evaluations: number };
  final_choice: { solution_id: number; note: string } | null;
  final_choice_history: number;
  discarded_solution_ids: number[];
  error: string | null;
  solutions_count?: number;
}

export interface DatasetInfo {
  dataset_id: string;
  m: number;
  n: number;
  feature_names: string[];
}

export interface ExportDoc {
  run_id: string;
  solution_id: number;
  feature_names: string[];
  mask: number[];
  note: string;
}

export interface RankRequest {
  scheme?: string;
  custom_weights?: number[];
  exclude_discarded?: boolean;
}
