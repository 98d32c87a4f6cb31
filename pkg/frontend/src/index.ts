export * from "./tensor.js";
export * from "./fusion.js";
export * from "./losses.js";
export * from "./model.js";
export * from "./ppm.js";
export * from "./manifest.js";
export * from "./sidecar.js";
export * from "./export.js";
export * from "./train.js";
export * from "./rng.js";
