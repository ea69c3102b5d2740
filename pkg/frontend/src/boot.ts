/** Page entry point: mount into #app against the serving origin. */

import { mountApp } from "./main.js";

const root = document.getElementById("app");
if (root !== null) {
  void mountApp(root);
}
