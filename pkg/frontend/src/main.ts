import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";

const root = document.getElementById("app");
if (root) {
  const base = `${window.location.origin}/api/v1`;
  new Dashboard(root, new ApiClient(base)).start();
}
