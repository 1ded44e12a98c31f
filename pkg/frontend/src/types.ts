// Wire types for the model service JSON surfaces.

export type ObjectKind = 'network' | 'composite' | 'area-network';

export interface InterfaceJson {
  id: string;
  name: string;
}

export interface ObjectJson {
  id: string;
  kind: ObjectKind;
  name: string;
  parent: string;
  children: string[];
  interfaces: InterfaceJson[];
}

export interface ConnectionJson {
  id: string;
  a_interface: string;
  b_interface: string;
}

export interface ResourceJson {
  object: string;
  capacity: number;
  delay: number;
}

export interface TaskJson {
  source: string;
  destination: string;
  label: string;
  start: number;
  repeats: number;
  interval_mean: number;
  interval_sigma: number;
  routed: boolean;
  request_ack: boolean;
}

export interface ServiceJson {
  object: string;
  kind: string;
  per_message_delay: number;
}

export interface ScenarioJson {
  name: string;
  duration: number;
  seed: number;
  resources: ResourceJson[];
  tasks: TaskJson[];
  services: ServiceJson[];
}

export interface ModelJson {
  name: string;
  version?: number;
  objects: ObjectJson[];
  connections: ConnectionJson[];
  scenarios: ScenarioJson[];
}

export type RunStatus = 'pending' | 'running' | 'done' | 'failed';

export interface RunHandle {
  run_id: string;
  status: RunStatus;
  scenario: string;
  seed: number;
  created_at: number;
  error?: string | null;
}

export interface LogRecordJson {
  time: number;
  kind: string;
  message_id: number;
  task_label: string;
  object: string;
  hop_index: number | null;
  detail: string;
}

export interface ErrorBody {
  error: string;
  detail?: string;
  violations?: string[];
}
