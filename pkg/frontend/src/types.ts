/**
 * Wire types for the planning service under /api/v1.
 *
 * These mirror the service's response models one to one; the UI renders
 * these fields verbatim and never derives its own analysis numbers.
 */

export type TierLabel = "CenH" | "ComH" | "HC";

export const TIER_LABELS: TierLabel[] = ["CenH", "ComH", "HC"];

export const FEATURE_COLUMNS = ["NoR", "TC", "NoS", "Cost"] as const;

export type FeatureColumn = (typeof FEATURE_COLUMNS)[number];

export type TierFeatures = Record<FeatureColumn, number>;

export interface ConsistencyBody {
  lambda_max: number;
  ci: number;
  ri: number;
  cr: number;
  passes: boolean;
}

export interface AnalyzeResponse {
  criteria: string[];
  weights: number[];
  consistency: ConsistencyBody;
  warnings: string[];
}

export interface AnalyzeRequest {
  criteria?: string[];
  entries: number[][];
  tol?: number;
  max_iter?: number;
  strict_scale?: boolean;
}

export interface MatrixField {
  matrix: { criteria?: string[] | null; entries: number[][] };
}

export type WeightsField = number[] | MatrixField;

export interface ScenarioCore {
  district?: string | null;
  weights: WeightsField;
  tiers: Record<TierLabel, TierFeatures>;
  penalty_rate?: number;
  dataset_id?: string | null;
}

export interface ScenarioDoc extends ScenarioCore {
  id: string;
  district: string;
  created?: string;
  modified?: string;
  schema_version?: number;
}

export interface ScenarioSummary {
  id: string;
  district: string;
}

export interface AllocateRequest {
  scenario_id?: string;
  scenario?: ScenarioCore;
  penalty_rate?: number;
  invert_cost?: boolean;
  penalty_base?: "log" | "raw";
}

export interface AllocateResponse {
  scenario_id: string | null;
  district: string | null;
  weights: number[];
  raw_index: Record<TierLabel, number>;
  penalized_index: Record<TierLabel, number>;
  ratio: Record<TierLabel, number>;
  ratio_tenths: Record<TierLabel, number>;
  penalty_rate: number;
  warnings: string[];
}

export interface TrainingBody {
  lookback?: number;
  hidden_size?: number;
  epochs?: number;
  lr?: number;
  seed?: number;
  batch_size?: number;
}

export interface ForecastRequest {
  dataset_id: string;
  horizon?: number;
  training?: TrainingBody;
}

export interface ForecastResponse {
  dataset_id: string;
  horizon: number;
  seed: number;
  last_observed_date: string;
  last_observed_value: number;
  dates: string[];
  values: number[];
  loss_curve: number[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}
