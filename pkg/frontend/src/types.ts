// Wire types for the classification service JSON API.

export type AnswerMode = 'binary' | 'multi_select';

export type RawAnswer = 'yes' | 'no' | string[];

export interface OptionView {
  id: string;
  label: string;
  is_none: boolean;
}

export interface MaterialView {
  id: string;
  kind: 'definition_guidance' | 'worked_example' | 'legal_text_link' | 'expert_contact';
  attached_to: string;
  title: string;
  body: string;
  external_url?: string;
}

export interface QuestionView {
  id: string;
  prompt: string;
  answer_mode: AnswerMode;
  legal_ref: string;
  options: OptionView[];
  materials: MaterialView[];
  phrasing_note?: string;
}

export interface SystemMetadata {
  system_name: string;
  description: string;
  input_modalities?: string[];
  output_modalities?: string[];
  intended_users?: string;
  deployment?: string;
}

export interface AnsweredView {
  node_id: string;
  answer: RawAnswer;
  justification: string | null;
  answered_at: string;
}

export interface SessionView {
  session_id: string;
  created_at: string;
  tutorial_confirmed: boolean;
  metadata: SystemMetadata;
  content_version: string;
  status: 'DRAFT' | 'FINALIZED';
  current_node: string;
  answers: AnsweredView[];
  result: ResultView | null;
}

export interface SessionEnvelope {
  session_id?: string;
  session: SessionView;
  question: QuestionView | null;
  idempotent?: boolean;
}

export interface LabelView {
  label: string;
  basis: string | null;
}

export interface RationaleView {
  node_id: string;
  answer: RawAnswer;
  predicate: string;
  next: string;
  legal_ref: string;
  actions: string[];
}

export interface ResultView {
  labels: LabelView[];
  categories: string[];
  rationale: RationaleView[];
}

export interface ReportView {
  session_id: string;
  content_version: string;
  generated_at: string;
  metadata: SystemMetadata;
  answers: AnsweredView[];
  result: ResultView;
}

export interface GraphDocument {
  version: string;
  graph: unknown;
  catalog: unknown;
}

export type TelemetryKind =
  | 'question_shown'
  | 'question_answered'
  | 'support_opened'
  | 'revision'
  | 'tutorial_confirmed';

export interface TelemetryEvent {
  session_id: string;
  kind: TelemetryKind;
  ts?: string;
  node_context?: string;
  material_id?: string;
}
